//! Chained Rosenbrock over the row-major flattening of the parameter
//! matrix: a standard non-convex stress test. No smoothness constant is
//! recorded (the gradient is not globally Lipschitz).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problems::Objective;

#[derive(Debug, Clone)]
pub struct RosenbrockProblem {
    name: String,
    rows: usize,
    cols: usize,
}

pub fn rosenbrock_matrix(rows: usize, cols: usize) -> Result<RosenbrockProblem> {
    RosenbrockProblem::new(rows, cols)
}

impl RosenbrockProblem {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows * cols < 2 {
            return Err(Error::ConfigInvalid(
                "chained Rosenbrock needs at least two entries".into(),
            ));
        }
        Ok(RosenbrockProblem {
            name: format!("rosenbrock_{rows}x{cols}"),
            rows,
            cols,
        })
    }
}

impl Objective for RosenbrockProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn eval(&self, w: &Matrix) -> f64 {
        let x = w.data();
        x.windows(2)
            .map(|p| {
                let gap = p[1] - p[0] * p[0];
                100.0 * gap * gap + (1.0 - p[0]) * (1.0 - p[0])
            })
            .sum()
    }

    fn grad(&self, w: &Matrix) -> Matrix {
        let x = w.data();
        let len = x.len();
        let mut g = vec![0.0; len];
        for k in 0..len - 1 {
            let gap = x[k + 1] - x[k] * x[k];
            g[k] += -400.0 * x[k] * gap - 2.0 * (1.0 - x[k]);
            g[k + 1] += 200.0 * gap;
        }
        Matrix::new(self.rows, self.cols, g)
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }

    fn init(&self, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::gaussian(self.rows, self.cols, &mut rng).scale(0.5)
    }
}
