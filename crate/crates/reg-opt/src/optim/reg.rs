//! The regularized step rules: line-normalized momentum descent, with and
//! without RMS retargeting and decoupled weight decay.

use crate::error::Result;
use crate::linalg::{rms_closed_form, Matrix, NormOrder};
use crate::optim::{
    apply_update, check_shapes, momentum_average, MomentumChain, OptState, RegConfig, RmsMode,
    StepStats,
};
use crate::racs::{normalize, racs_iterate, NormAxisPolicy};

/// Naive regularized step: the momentum average is line-normalized, the
/// normalized matrix both drives the update and replaces the momentum
/// buffer, feeding the next step's `mu * M` term.
pub fn naive_reg_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    alpha: f64,
    mu: f64,
    p: NormOrder,
    policy: NormAxisPolicy,
) -> Result<StepStats> {
    check_shapes(w, grad, state, "naive regularized step")?;
    let pre = momentum_average(&state.momentum, grad, mu);
    let h = pre.row_l2_sum();
    let normalized = normalize(&pre, p, policy);
    let update_rms = apply_update(w, &normalized.scale(alpha));
    state.momentum = normalized;
    state.step_count += 1;
    Ok(StepStats {
        momentum_row_norm_sum: h,
        update_rms,
    })
}

/// Full regularized step at the configured learning rate.
pub fn reg_step(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    cfg: &RegConfig,
) -> Result<StepStats> {
    reg_step_with_lr(w, grad, state, cfg, cfg.alpha)
}

/// Full regularized step with an explicit (e.g. scheduled) learning rate:
/// normalize the momentum average, rescale it to the target RMS, then apply
/// it together with decoupled weight decay.
pub fn reg_step_with_lr(
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    cfg: &RegConfig,
    alpha: f64,
) -> Result<StepStats> {
    cfg.validate()?;
    check_shapes(w, grad, state, "regularized step")?;

    let pre = momentum_average(&state.momentum, grad, cfg.mu);
    let h = pre.row_l2_sum();
    let normalized = if cfg.t == 1 {
        normalize(&pre, cfg.p, cfg.policy)
    } else {
        racs_iterate(&pre, cfg.p, cfg.t)?
    };

    let rms = match cfg.effective_rms_mode() {
        RmsMode::ClosedForm => rms_closed_form(w.rows(), w.cols()),
        RmsMode::Empirical => normalized.rms(),
    };
    // A zero momentum average normalizes to zero; skip the retargeting
    // rather than divide by zero.
    let retargeted = if rms > 0.0 {
        normalized.scale(cfg.rho_target / rms)
    } else {
        normalized.clone()
    };

    let mut update = retargeted;
    update.axpy(cfg.lambda, w).expect("shapes checked");
    let update_rms = apply_update(w, &update.scale(alpha));

    state.momentum = match cfg.momentum_chain {
        MomentumChain::Normalized => normalized,
        MomentumChain::Raw => pre,
    };
    state.step_count += 1;
    Ok(StepStats {
        momentum_row_norm_sum: h,
        update_rms,
    })
}
