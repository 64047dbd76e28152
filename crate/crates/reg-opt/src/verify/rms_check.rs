//! Exactness check for the closed-form RMS of `l2` line-normalized
//! matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{rms_closed_form, Matrix, NormOrder};
use crate::racs::{normalize, NormAxisPolicy};
use crate::verify::{TheoremId, TheoremReport};

/// Draw `trials` random Gaussian matrices with shapes up to
/// `max_rows x max_cols` and report the largest deviation between the
/// measured RMS of the `l2`-normalized matrix and `sqrt(1/max(m, n))`.
pub fn check_rms_theorem(
    max_rows: usize,
    max_cols: usize,
    trials: usize,
    seed: u64,
) -> TheoremReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut worst_shape = (1, 1);
    for _ in 0..trials {
        let m = rng.gen_range(1..=max_rows);
        let n = rng.gen_range(1..=max_cols);
        let matrix = Matrix::gaussian(m, n, &mut rng);
        let normalized = normalize(&matrix, NormOrder::L2, NormAxisPolicy::ShapeDriven);
        let deviation = (normalized.rms() - rms_closed_form(m, n)).abs();
        if deviation > worst {
            worst = deviation;
            worst_shape = (m, n);
        }
    }
    let bound = 1e-12;
    TheoremReport::new(
        TheoremId::T2,
        worst,
        bound,
        0.0,
        seed,
        serde_json::json!({
            "check": "rms_closed_form",
            "trials": trials,
            "max_shape": [max_rows, max_cols],
            "worst_shape": worst_shape,
            "tol": bound,
        }),
    )
}
