//! Gradient descent with damped momentum.

use crate::error::Result;
use crate::linalg::Matrix;
use crate::optim::{apply_update, check_shapes, momentum_average, OptState, StepStats};

/// One momentum descent step:
/// `M <- mu*M + (1-mu)*grad`, `W <- W - alpha*M`.
pub fn gdm_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    alpha: f64,
    mu: f64,
) -> Result<StepStats> {
    check_shapes(w, grad, state, "gdm step")?;
    let momentum = momentum_average(&state.momentum, grad, mu);
    let h = momentum.row_l2_sum();
    let update_rms = apply_update(w, &momentum.scale(alpha));
    state.momentum = momentum;
    state.step_count += 1;
    Ok(StepStats {
        momentum_row_norm_sum: h,
        update_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_momentum_is_plain_gradient_descent() {
        let mut w = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let g = Matrix::from_rows(&[vec![0.5, -0.5], vec![1.0, 0.0]]);
        let mut state = OptState::for_param(&w);
        gdm_step(&mut w, &g, &mut state, 1.0, 0.0).unwrap();
        let expected = Matrix::from_rows(&[vec![0.5, 2.5], vec![2.0, 4.0]]);
        assert_eq!(w, expected);
    }

    #[test]
    fn first_step_momentum_is_damped_gradient() {
        let mut w = Matrix::zeros(2, 3);
        let g = Matrix::new(2, 3, vec![1.0; 6]);
        let mut state = OptState::for_param(&w);
        gdm_step(&mut w, &g, &mut state, 0.1, 0.9).unwrap();
        assert!(state.momentum.max_abs_diff(&g.scale(0.1)) < 1e-16);
    }

    #[test]
    fn two_steps_with_constant_gradient_unroll_by_hand() {
        // mu = 0.5, alpha = 1: M1 = 0.5 G, M2 = 0.75 G, so W2 = W0 - 1.25 G.
        let w0 = Matrix::from_rows(&[vec![2.0, -1.0]]);
        let g = Matrix::from_rows(&[vec![1.0, 4.0]]);
        let mut w = w0.clone();
        let mut state = OptState::for_param(&w);
        gdm_step(&mut w, &g, &mut state, 1.0, 0.5).unwrap();
        gdm_step(&mut w, &g, &mut state, 1.0, 0.5).unwrap();
        let expected = w0.sub(&g.scale(1.25)).unwrap();
        assert!(w.max_abs_diff(&expected) < 1e-15);
        assert_eq!(state.step_count, 2);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut w = Matrix::zeros(2, 2);
        let g = Matrix::zeros(2, 3);
        let mut state = OptState::for_param(&w);
        assert!(gdm_step(&mut w, &g, &mut state, 0.1, 0.9).is_err());
    }
}
