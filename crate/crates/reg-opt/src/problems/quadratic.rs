//! The canonical smooth objective `f(W) = 0.5 * ||A W B - C||_F^2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{pseudo_inverse, singular_values, Matrix};
use crate::problems::Objective;

/// Matrix least-squares objective with gradient `A^T (A W B - C) B^T`,
/// exact smoothness constant `(sigma_max(A) * sigma_max(B))^2`, and the
/// least-squares optimum recorded at construction.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    name: String,
    a: Matrix,
    b: Matrix,
    c: Matrix,
    lipschitz: f64,
    f_star: f64,
}

/// Construct the objective from its three factors. `A` is `q x m`, `B` is
/// `n x r`, `C` is `q x r`; the parameter is `m x n`.
pub fn quadratic_problem(a: Matrix, b: Matrix, c: Matrix) -> Result<QuadraticProblem> {
    QuadraticProblem::new(a, b, c)
}

impl QuadraticProblem {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        if a.rows() != c.rows() || b.cols() != c.cols() {
            return Err(Error::shape(
                (a.rows(), b.cols()),
                c.shape(),
                "quadratic residual C",
            ));
        }
        let sigma_a = singular_values(&a)?[0];
        let sigma_b = singular_values(&b)?[0];
        let lipschitz = (sigma_a * sigma_b).powi(2);

        // Least-squares optimum W* = A+ C B+; values at rounding level mean
        // C lies in the range of the map and the true optimum is zero.
        let w_star = pseudo_inverse(&a)?
            .matmul(&c)?
            .matmul(&pseudo_inverse(&b)?)?;
        let mut problem = QuadraticProblem {
            name: format!("quadratic_{}x{}", a.cols(), b.rows()),
            a,
            b,
            c,
            lipschitz,
            f_star: 0.0,
        };
        let attained = Objective::eval(&problem, &w_star);
        problem.f_star = if attained < 1e-18 { 0.0 } else { attained };
        Ok(problem)
    }

    /// `A = B = I`, `C = 0`: the plain quadratic bowl `0.5 * ||W||_F^2`.
    pub fn identity(m: usize, n: usize) -> Self {
        QuadraticProblem::new(Matrix::identity(m), Matrix::identity(n), Matrix::zeros(m, n))
            .expect("identity factors are always valid")
    }

    /// Well-conditioned random factors with `C = A W_target B`, so the
    /// optimum value is zero by construction.
    pub fn random(m: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::identity(m)
            .add(&Matrix::gaussian(m, m, &mut rng).scale(0.3 / (m as f64).sqrt()))
            .unwrap();
        let b = Matrix::identity(n)
            .add(&Matrix::gaussian(n, n, &mut rng).scale(0.3 / (n as f64).sqrt()))
            .unwrap();
        let w_target = Matrix::gaussian(m, n, &mut rng);
        let c = a.matmul(&w_target).unwrap().matmul(&b).unwrap();
        QuadraticProblem::new(a, b, c).expect("factor shapes are consistent")
    }

    fn residual(&self, w: &Matrix) -> Matrix {
        self.a
            .matmul(w)
            .expect("dims validated")
            .matmul(&self.b)
            .expect("dims validated")
            .sub(&self.c)
            .expect("dims validated")
    }
}

impl Objective for QuadraticProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> (usize, usize) {
        (self.a.cols(), self.b.rows())
    }

    fn eval(&self, w: &Matrix) -> f64 {
        0.5 * self.residual(w).frobenius_norm().powi(2)
    }

    fn grad(&self, w: &Matrix) -> Matrix {
        self.a
            .transpose()
            .matmul(&self.residual(w))
            .expect("dims validated")
            .matmul(&self.b.transpose())
            .expect("dims validated")
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn f_star(&self) -> Option<f64> {
        Some(self.f_star)
    }
}
