//! Differentiable test objectives over matrix parameters, each with an
//! analytic gradient and, where available, a known smoothness constant and
//! optimum.

mod logistic;
mod mlp;
mod quadratic;
mod rosenbrock;

pub use logistic::{logistic_problem, LogisticProblem};
pub use mlp::{mlp_problem, MlpProblem};
pub use quadratic::{quadratic_problem, QuadraticProblem};
pub use rosenbrock::{rosenbrock_matrix, RosenbrockProblem};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;

/// A differentiable objective over a single matrix parameter.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    /// Shape of the parameter matrix `W`.
    fn dims(&self) -> (usize, usize);

    fn eval(&self, w: &Matrix) -> f64;

    fn grad(&self, w: &Matrix) -> Matrix;

    /// Frobenius-norm Lipschitz constant of the gradient, when known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// A lower bound on the objective, when known.
    fn f_star(&self) -> Option<f64> {
        None
    }

    /// Seeded starting point.
    fn init(&self, seed: u64) -> Matrix {
        let (m, n) = self.dims();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::gaussian(m, n, &mut rng)
    }
}

/// An objective over several named parameter matrices. Multi-layer problems
/// implement this directly; every single-matrix [`Objective`] gets it for
/// free as a one-group view.
pub trait GroupedObjective: Send + Sync {
    fn name(&self) -> &str;

    fn group_names(&self) -> Vec<String>;

    fn group_dims(&self) -> Vec<(usize, usize)>;

    fn eval(&self, params: &[Matrix]) -> f64;

    fn grads(&self, params: &[Matrix]) -> Vec<Matrix>;

    fn init(&self, seed: u64) -> Vec<Matrix>;

    fn f_star(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective> GroupedObjective for T {
    fn name(&self) -> &str {
        Objective::name(self)
    }

    fn group_names(&self) -> Vec<String> {
        vec!["w".to_string()]
    }

    fn group_dims(&self) -> Vec<(usize, usize)> {
        vec![self.dims()]
    }

    fn eval(&self, params: &[Matrix]) -> f64 {
        Objective::eval(self, &params[0])
    }

    fn grads(&self, params: &[Matrix]) -> Vec<Matrix> {
        vec![Objective::grad(self, &params[0])]
    }

    fn init(&self, seed: u64) -> Vec<Matrix> {
        vec![Objective::init(self, seed)]
    }

    fn f_star(&self) -> Option<f64> {
        Objective::f_star(self)
    }
}
