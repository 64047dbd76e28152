//! Logistic loss over a matrix of row classifiers.
//!
//! Each of the `m` rows of `W` scores every sample against the same +/-1
//! labels, and the loss is the mean binary logistic loss over rows and
//! samples. At `m = 1` this is plain binary logistic regression; larger `m`
//! keeps the parameter genuinely matrix-shaped (rows with independent
//! trajectories) while preserving an exact smoothness constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::problems::Objective;

#[derive(Debug, Clone)]
pub struct LogisticProblem {
    name: String,
    /// `s x n` design matrix.
    x: Matrix,
    /// +/-1 labels, one per sample.
    y: Vec<f64>,
    rows: usize,
    lipschitz: f64,
}

/// Build the problem from data. `x` is `s x n`, `y` holds +/-1 labels, and
/// `rows` is the number of classifier rows in `W`.
pub fn logistic_problem(x: Matrix, y: Vec<f64>, rows: usize) -> Result<LogisticProblem> {
    LogisticProblem::new(x, y, rows)
}

impl LogisticProblem {
    pub fn new(x: Matrix, y: Vec<f64>, rows: usize) -> Result<Self> {
        if y.len() != x.rows() {
            return Err(Error::ConfigInvalid(format!(
                "{} labels for {} samples",
                y.len(),
                x.rows()
            )));
        }
        if rows < 1 {
            return Err(Error::ConfigInvalid("need at least one output row".into()));
        }
        if !y.iter().all(|&v| v == 1.0 || v == -1.0) {
            return Err(Error::ConfigInvalid("labels must be +/-1".into()));
        }
        let s = x.rows() as f64;
        // The per-sample sigmoid curvature is at most 1/4, so the mean loss
        // is smooth with constant sigma_max(X)^2 / (4 * s * rows).
        let sigma = singular_values(&x)?[0];
        let lipschitz = sigma * sigma / (4.0 * s * rows as f64);
        Ok(LogisticProblem {
            name: format!("logistic_{}x{}", rows, x.cols()),
            x,
            y,
            rows,
            lipschitz,
        })
    }

    /// Seeded synthetic instance: mildly imbalanced feature scales, a
    /// wide-margin generating hyperplane whose coefficients grow inversely
    /// with the feature scales, and 10% label flips. The flips keep the
    /// optimal loss bounded away from zero; the wide margin pushes the
    /// optimum a long way from small initializations.
    pub fn synthetic(samples: usize, features: usize, rows: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scales: Vec<f64> = (0..features)
            .map(|_| 10.0_f64.powf(rng.gen_range(-0.5..0.5)))
            .collect();
        let mut x = Matrix::gaussian(samples, features, &mut rng);
        for i in 0..samples {
            for (j, &scale) in scales.iter().enumerate() {
                let v = x.get(i, j) * scale;
                x.set(i, j, v);
            }
        }
        let truth: Vec<f64> = scales
            .iter()
            .map(|&s| {
                let w: f64 = rng.sample(rand_distr::StandardNormal);
                6.0 * w / s
            })
            .collect();
        let y = (0..samples)
            .map(|i| {
                let score: f64 = (0..features).map(|j| truth[j] * x.get(i, j)).sum();
                let flip = rng.gen_range(0.0..1.0) < 0.1;
                let label = score >= 0.0;
                if label != flip {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        LogisticProblem::new(x, y, rows)
    }

    fn scores(&self, w: &Matrix) -> Matrix {
        w.matmul(&self.x.transpose()).expect("dims validated")
    }
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl Objective for LogisticProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> (usize, usize) {
        (self.rows, self.x.cols())
    }

    fn eval(&self, w: &Matrix) -> f64 {
        let z = self.scores(w);
        let mut total = 0.0;
        for r in 0..self.rows {
            for (i, &label) in self.y.iter().enumerate() {
                total += softplus(-label * z.get(r, i));
            }
        }
        total / (self.rows as f64 * self.y.len() as f64)
    }

    fn grad(&self, w: &Matrix) -> Matrix {
        let z = self.scores(w);
        let s = self.y.len();
        let mut coeff = Matrix::zeros(self.rows, s);
        let scale = 1.0 / (self.rows as f64 * s as f64);
        for r in 0..self.rows {
            for (i, &label) in self.y.iter().enumerate() {
                coeff.set(r, i, -scale * label * sigmoid(-label * z.get(r, i)));
            }
        }
        coeff.matmul(&self.x).expect("dims validated")
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }

    fn init(&self, seed: u64) -> Matrix {
        let (m, n) = self.dims();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::gaussian(m, n, &mut rng).scale(0.1)
    }
}
