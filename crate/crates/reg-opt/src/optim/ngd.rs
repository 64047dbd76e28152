//! Normalized gradient descent: the momentum average scaled by its
//! Frobenius norm. A global rescaling only; the direction is untouched.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::optim::{apply_update, check_shapes, momentum_average, OptState, StepStats};

pub fn ngd_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    alpha: f64,
    mu: f64,
) -> Result<StepStats> {
    check_shapes(w, grad, state, "normalized gradient step")?;
    let momentum = momentum_average(&state.momentum, grad, mu);
    let fro = momentum.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroGradient);
    }
    let h = momentum.row_l2_sum();
    let update_rms = apply_update(w, &momentum.scale(alpha / fro));
    state.momentum = momentum;
    state.step_count += 1;
    Ok(StepStats {
        momentum_row_norm_sum: h,
        update_rms,
    })
}
