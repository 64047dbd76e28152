//! Two-layer tanh perceptron on a synthetic Gaussian-blob classification
//! set, with hand-coded backpropagation. Exposes two parameter groups
//! ("layer1", "layer2"), which is what the per-group hybrid dispatch needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problems::GroupedObjective;

const MAX_WIDTH: usize = 64;
const MAX_SAMPLES: usize = 2048;

#[derive(Debug, Clone)]
pub struct MlpProblem {
    name: String,
    /// `s x n_in` inputs, one sample per row.
    inputs: Matrix,
    /// `s x n_out` one-hot targets.
    targets: Matrix,
    n_in: usize,
    hidden: usize,
    n_out: usize,
}

/// Build the blob-classification perceptron. Widths are
/// `(n_in, hidden, n_out)`, each at most 64; `samples` at most 2048.
pub fn mlp_problem(
    widths: (usize, usize, usize),
    samples: usize,
    seed: u64,
) -> Result<MlpProblem> {
    MlpProblem::new(widths, samples, seed)
}

impl MlpProblem {
    pub fn new(widths: (usize, usize, usize), samples: usize, seed: u64) -> Result<Self> {
        let (n_in, hidden, n_out) = widths;
        if n_in == 0 || hidden == 0 || n_out == 0 {
            return Err(Error::ConfigInvalid("layer widths must be positive".into()));
        }
        if n_in > MAX_WIDTH || hidden > MAX_WIDTH || n_out > MAX_WIDTH {
            return Err(Error::ConfigInvalid(format!(
                "layer widths are capped at {MAX_WIDTH}"
            )));
        }
        if samples == 0 || samples > MAX_SAMPLES {
            return Err(Error::ConfigInvalid(format!(
                "sample count must lie in 1..={MAX_SAMPLES}"
            )));
        }

        // One Gaussian blob per output class. Centers sit at a small input
        // scale with overlapping noise, so perfect classification is out of
        // reach and useful first-layer weights are well away from a small
        // initialization.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = Matrix::gaussian(n_out, n_in, &mut rng).scale(0.6);
        let mut inputs = Matrix::zeros(samples, n_in);
        let mut targets = Matrix::zeros(samples, n_out);
        for i in 0..samples {
            let class = i % n_out;
            for j in 0..n_in {
                let noise: f64 = rng.sample(StandardNormal);
                inputs.set(i, j, centers.get(class, j) + 0.35 * noise);
            }
            targets.set(i, class, 1.0);
        }

        Ok(MlpProblem {
            name: format!("mlp_{n_in}x{hidden}x{n_out}"),
            inputs,
            targets,
            n_in,
            hidden,
            n_out,
        })
    }

    /// Forward pass: hidden activations `tanh(X W1^T)` and predictions
    /// `H W2^T`.
    fn forward(&self, w1: &Matrix, w2: &Matrix) -> (Matrix, Matrix) {
        let h = self
            .inputs
            .matmul(&w1.transpose())
            .expect("dims validated")
            .map(f64::tanh);
        let pred = h.matmul(&w2.transpose()).expect("dims validated");
        (h, pred)
    }

    fn check_params(&self, params: &[Matrix]) {
        assert_eq!(params.len(), 2, "expected [layer1, layer2]");
        assert_eq!(params[0].shape(), (self.hidden, self.n_in));
        assert_eq!(params[1].shape(), (self.n_out, self.hidden));
    }
}

impl GroupedObjective for MlpProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn group_names(&self) -> Vec<String> {
        vec!["layer1".to_string(), "layer2".to_string()]
    }

    fn group_dims(&self) -> Vec<(usize, usize)> {
        vec![(self.hidden, self.n_in), (self.n_out, self.hidden)]
    }

    /// Mean squared error against the one-hot targets, averaged over both
    /// samples and output units. The all-zero predictor scores exactly
    /// `1 / n_out`.
    fn eval(&self, params: &[Matrix]) -> f64 {
        self.check_params(params);
        let (_, pred) = self.forward(&params[0], &params[1]);
        let residual = pred.sub(&self.targets).expect("dims validated");
        let s = self.inputs.rows() as f64;
        residual.frobenius_norm().powi(2) / (s * self.n_out as f64)
    }

    fn grads(&self, params: &[Matrix]) -> Vec<Matrix> {
        self.check_params(params);
        let (w1, w2) = (&params[0], &params[1]);
        let (h, pred) = self.forward(w1, w2);
        let s = self.inputs.rows() as f64;
        let scale = 2.0 / (s * self.n_out as f64);

        // d loss / d pred
        let dpred = pred.sub(&self.targets).expect("dims validated").scale(scale);
        // layer2: dL/dW2 = dpred^T H
        let g2 = dpred.transpose().matmul(&h).expect("dims validated");
        // back through tanh: dL/dA = (dpred W2) .* (1 - H^2)
        let dh = dpred.matmul(w2).expect("dims validated");
        let mut da = dh;
        for i in 0..da.rows() {
            for j in 0..da.cols() {
                let t = h.get(i, j);
                let v = da.get(i, j) * (1.0 - t * t);
                da.set(i, j, v);
            }
        }
        // layer1: dL/dW1 = dA^T X
        let g1 = da.transpose().matmul(&self.inputs).expect("dims validated");
        vec![g1, g2]
    }

    fn init(&self, seed: u64) -> Vec<Matrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = Matrix::gaussian(self.hidden, self.n_in, &mut rng)
            .scale(1.0 / (self.n_in as f64).sqrt());
        let w2 = Matrix::gaussian(self.n_out, self.hidden, &mut rng)
            .scale(1.0 / (self.hidden as f64).sqrt());
        vec![w1, w2]
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }
}
