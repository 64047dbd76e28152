//! Bias-corrected Adam and its decoupled-weight-decay variant.

use crate::error::Result;
use crate::linalg::Matrix;
use crate::optim::{apply_update, check_shapes, OptState, StepStats};

pub fn adam_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    alpha: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) -> Result<StepStats> {
    adamw_step(w, grad, state, alpha, beta1, beta2, epsilon, 0.0)
}

/// AdamW step: bias-corrected moment estimates drive the adaptive update,
/// and weight decay is applied directly to the parameters rather than mixed
/// into the gradient.
#[allow(clippy::too_many_arguments)]
pub fn adamw_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    alpha: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    lambda: f64,
) -> Result<StepStats> {
    check_shapes(w, grad, state, "adam step")?;
    if state.second_moment.is_none() {
        state.second_moment = Some(Matrix::zeros(w.rows(), w.cols()));
    }

    let first = &mut state.momentum;
    let second = state.second_moment.as_mut().expect("just initialized");
    let k = state.step_count + 1;
    let bias1 = 1.0 - beta1.powi(k as i32);
    let bias2 = 1.0 - beta2.powi(k as i32);

    let (rows, cols) = w.shape();
    let mut update = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let g = grad.get(i, j);
            let m = beta1 * first.get(i, j) + (1.0 - beta1) * g;
            let v = beta2 * second.get(i, j) + (1.0 - beta2) * g * g;
            first.set(i, j, m);
            second.set(i, j, v);
            let m_hat = m / bias1;
            let v_hat = v / bias2;
            update.set(i, j, alpha * (m_hat / (v_hat.sqrt() + epsilon) + lambda * w.get(i, j)));
        }
    }

    let h = state.momentum.row_l2_sum();
    let update_rms = apply_update(w, &update);
    state.step_count = k;
    Ok(StepStats {
        momentum_row_norm_sum: h,
        update_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    #[test]
    fn first_step_is_sign_like() {
        // Bias correction cancels at k = 1, so the update is
        // alpha * g / (|g| + eps).
        let mut w = Matrix::zeros(2, 2);
        let g = Matrix::from_rows(&[vec![3.0, -0.5], vec![0.25, -8.0]]);
        let mut state = OptState::for_param(&w);
        adam_step(&mut w, &g, &mut state, 1.0, B1, B2, EPS).unwrap();
        let expected = g.map(|x| if x == 0.0 { 0.0 } else { -x / (x.abs() + EPS) });
        assert!(w.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn adamw_without_decay_equals_adam() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w0 = Matrix::gaussian(3, 4, &mut rng);
        let g = Matrix::gaussian(3, 4, &mut rng);
        let mut w_a = w0.clone();
        let mut s_a = OptState::for_param(&w_a);
        let mut w_b = w0;
        let mut s_b = OptState::for_param(&w_b);
        for _ in 0..3 {
            adam_step(&mut w_a, &g, &mut s_a, 0.01, B1, B2, EPS).unwrap();
            adamw_step(&mut w_b, &g, &mut s_b, 0.01, B1, B2, EPS, 0.0).unwrap();
        }
        assert_eq!(w_a, w_b);
    }

    #[test]
    fn constant_gradient_update_converges_to_sign_like_fixed_point() {
        let mut w = Matrix::zeros(1, 3);
        let g = Matrix::from_rows(&[vec![2.0, -0.1, 5.0]]);
        let mut state = OptState::for_param(&w);
        let mut prev = w.clone();
        for _ in 0..2000 {
            prev = w.clone();
            adam_step(&mut w, &g, &mut state, 1e-3, B1, B2, EPS).unwrap();
        }
        // Late in the run the per-step movement is alpha * g/(|g|+eps).
        let step = prev.sub(&w).unwrap().scale(1.0 / 1e-3);
        let expected = g.map(|x| x / (x.abs() + EPS));
        assert!(step.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn decay_shrinks_weights_independently_of_gradient() {
        let mut w = Matrix::from_rows(&[vec![10.0, -10.0]]);
        let g = Matrix::zeros(1, 2);
        let mut state = OptState::for_param(&w);
        adamw_step(&mut w, &g, &mut state, 0.1, B1, B2, EPS, 0.05).unwrap();
        let expected = Matrix::from_rows(&[vec![10.0, -10.0]]).scale(1.0 - 0.1 * 0.05);
        assert!(w.max_abs_diff(&expected) < 1e-12);
    }
}
