//! First-order step rules over matrix parameters: plain momentum descent,
//! the row/column-scaled regularized variants, Frobenius-normalized descent,
//! Adam/AdamW, and per-group hybrid dispatch.

mod adam;
mod gdm;
mod hybrid;
mod ngd;
mod reg;

pub use adam::{adam_step, adamw_step};
pub use gdm::gdm_step;
pub use hybrid::hybrid_step;
pub use ngd::ngd_step;
pub use reg::{naive_reg_step, reg_step, reg_step_with_lr};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, NormOrder};
use crate::racs::NormAxisPolicy;

/// How the per-step RMS of the normalized momentum is obtained when
/// retargeting the update magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RmsMode {
    /// `sqrt(1/max(m, n))`; exact for `l2` single-pass shape-driven
    /// normalization and free to compute.
    ClosedForm,
    /// Measure the RMS of the normalized matrix directly.
    Empirical,
}

/// Which matrix the momentum buffer carries into the next step.
///
/// The regularized recursion overwrites the momentum with its normalized
/// value, so `Normalized` is the default; `Raw` keeps the pre-normalization
/// average and is exposed so the alternative chaining is testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumChain {
    Normalized,
    Raw,
}

/// Hyperparameters of the full regularized step rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegConfig {
    /// Learning rate.
    pub alpha: f64,
    /// Momentum coefficient in `[0, 1)`; gradients enter damped by `1 - mu`.
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Norm order for line normalization.
    #[serde(default = "default_p")]
    pub p: NormOrder,
    /// Target RMS of the rescaled update matrix.
    #[serde(default = "default_rho_target")]
    pub rho_target: f64,
    /// Decoupled weight decay coefficient.
    #[serde(default)]
    pub lambda: f64,
    /// Normalization iteration count; 1 selects the single-pass operator,
    /// larger values the alternating row/column iteration.
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default)]
    pub policy: NormAxisPolicy,
    /// Leave unset to pick the closed form exactly when it is valid
    /// (`p = 2`, `t = 1`, shape-driven axis) and the measured RMS otherwise.
    #[serde(default)]
    pub rms_mode: Option<RmsMode>,
    #[serde(default = "default_chain")]
    pub momentum_chain: MomentumChain,
}

fn default_mu() -> f64 {
    0.9
}
fn default_p() -> NormOrder {
    NormOrder::L2
}
fn default_rho_target() -> f64 {
    0.2
}
fn default_t() -> usize {
    1
}
fn default_chain() -> MomentumChain {
    MomentumChain::Normalized
}

impl RegConfig {
    /// Community-default hyperparameters around the given learning rate.
    pub fn new(alpha: f64) -> Self {
        RegConfig {
            alpha,
            mu: default_mu(),
            p: default_p(),
            rho_target: default_rho_target(),
            lambda: 0.0,
            t: default_t(),
            policy: NormAxisPolicy::ShapeDriven,
            rms_mode: None,
            momentum_chain: default_chain(),
        }
    }

    fn closed_form_valid(&self) -> bool {
        self.p == NormOrder::L2 && self.t == 1 && self.policy == NormAxisPolicy::ShapeDriven
    }

    /// The RMS mode actually used by a step: the configured one, or the
    /// closed form exactly when it applies.
    pub fn effective_rms_mode(&self) -> RmsMode {
        self.rms_mode.unwrap_or(if self.closed_form_valid() {
            RmsMode::ClosedForm
        } else {
            RmsMode::Empirical
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::ConfigInvalid("alpha must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::ConfigInvalid("mu must lie in [0, 1)".into()));
        }
        if !(self.rho_target > 0.0 && self.rho_target.is_finite()) {
            return Err(Error::ConfigInvalid("rho_target must be positive".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::ConfigInvalid("lambda must be >= 0".into()));
        }
        if self.t < 1 {
            return Err(Error::ConfigInvalid("t must be >= 1".into()));
        }
        if self.rms_mode == Some(RmsMode::ClosedForm) && !self.closed_form_valid() {
            return Err(Error::ConfigInvalid(
                "closed-form RMS requires p = 2, t = 1 and the shape-driven axis".into(),
            ));
        }
        Ok(())
    }

    /// Non-fatal configuration advisories.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(0.2..=0.4).contains(&self.rho_target) {
            out.push(format!(
                "rho_target = {} is outside the usual 0.2..0.4 range",
                self.rho_target
            ));
        }
        out
    }
}

/// Adam/AdamW moment hyperparameters plus decoupled decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub alpha: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub lambda: f64,
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_epsilon() -> f64 {
    1e-8
}

impl AdamWConfig {
    pub fn new(alpha: f64) -> Self {
        AdamWConfig {
            alpha,
            beta1: default_beta1(),
            beta2: default_beta2(),
            epsilon: default_epsilon(),
            lambda: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::ConfigInvalid("alpha must be positive".into()));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::ConfigInvalid(format!("{name} must lie in [0, 1)")));
            }
        }
        if self.epsilon <= 0.0 {
            return Err(Error::ConfigInvalid("epsilon must be positive".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::ConfigInvalid("lambda must be >= 0".into()));
        }
        Ok(())
    }
}

/// Per-parameter optimizer state. The momentum buffer starts at zero and
/// always matches the parameter shape; Adam-family steps lazily allocate the
/// second moment.
#[derive(Debug, Clone, PartialEq)]
pub struct OptState {
    pub momentum: Matrix,
    pub second_moment: Option<Matrix>,
    pub step_count: u64,
}

impl OptState {
    pub fn new(rows: usize, cols: usize) -> Self {
        OptState {
            momentum: Matrix::zeros(rows, cols),
            second_moment: None,
            step_count: 0,
        }
    }

    pub fn for_param(w: &Matrix) -> Self {
        OptState::new(w.rows(), w.cols())
    }
}

/// Which step rule a parameter group is bound to for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    Reg,
    AdamW,
}

/// A named parameter matrix with its optimizer assignment and state.
#[derive(Debug, Clone)]
pub struct ParamGroup {
    pub name: String,
    pub weights: Matrix,
    pub assignment: Assignment,
    pub state: OptState,
}

impl ParamGroup {
    pub fn new(name: impl Into<String>, weights: Matrix, assignment: Assignment) -> Self {
        let state = OptState::for_param(&weights);
        ParamGroup {
            name: name.into(),
            weights,
            assignment,
            state,
        }
    }
}

/// Per-step diagnostics every step rule reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// Sum over rows of the `l2` norms of the pre-normalization momentum;
    /// the `h_k` quantity of the momentum convergence bound.
    pub momentum_row_norm_sum: f64,
    /// RMS of the applied parameter change (including any weight decay).
    pub update_rms: f64,
}

pub(crate) fn check_shapes(
    w: &Matrix,
    grad: &Matrix,
    state: &OptState,
    context: &'static str,
) -> Result<()> {
    if grad.shape() != w.shape() {
        return Err(Error::shape(w.shape(), grad.shape(), context));
    }
    if state.momentum.shape() != w.shape() {
        return Err(Error::shape(w.shape(), state.momentum.shape(), context));
    }
    Ok(())
}

/// `mu * momentum + (1 - mu) * grad`.
pub(crate) fn momentum_average(momentum: &Matrix, grad: &Matrix, mu: f64) -> Matrix {
    let mut out = momentum.scale(mu);
    out.axpy(1.0 - mu, grad).expect("shapes checked by caller");
    out
}

/// Apply `w -= update` and report the update RMS.
pub(crate) fn apply_update(w: &mut Matrix, update: &Matrix) -> f64 {
    let rms = update.rms();
    w.axpy(-1.0, update).expect("shapes checked by caller");
    rms
}

/// Config-bearing dispatcher used by the run harness; the scheduled learning
/// rate arrives per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Optimizer {
    Gdm {
        mu: f64,
    },
    NaiveReg {
        mu: f64,
        p: NormOrder,
        #[serde(default)]
        policy: NormAxisPolicy,
    },
    Reg(RegConfig),
    Ngd {
        mu: f64,
    },
    Adam {
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    #[serde(rename = "adamw")]
    AdamW(AdamWConfig),
}

impl Optimizer {
    pub fn step(
        &self,
        w: &mut Matrix,
        grad: &Matrix,
        state: &mut OptState,
        alpha: f64,
    ) -> Result<StepStats> {
        match self {
            Optimizer::Gdm { mu } => gdm_step(w, grad, state, alpha, *mu),
            Optimizer::NaiveReg { mu, p, policy } => {
                naive_reg_step(w, grad, state, alpha, *mu, *p, *policy)
            }
            Optimizer::Reg(cfg) => reg_step_with_lr(w, grad, state, cfg, alpha),
            Optimizer::Ngd { mu } => ngd_step(w, grad, state, alpha, *mu),
            Optimizer::Adam {
                beta1,
                beta2,
                epsilon,
            } => adam_step(w, grad, state, alpha, *beta1, *beta2, *epsilon),
            Optimizer::AdamW(cfg) => adamw_step(
                w,
                grad,
                state,
                alpha,
                cfg.beta1,
                cfg.beta2,
                cfg.epsilon,
                cfg.lambda,
            ),
        }
    }

    /// Base learning rate carried by the config, if any.
    pub fn base_alpha(&self) -> Option<f64> {
        match self {
            Optimizer::Reg(cfg) => Some(cfg.alpha),
            Optimizer::AdamW(cfg) => Some(cfg.alpha),
            _ => None,
        }
    }

    /// Momentum-style averaging coefficient, used by the Lyapunov
    /// diagnostic.
    pub fn momentum_coeff(&self) -> f64 {
        match self {
            Optimizer::Gdm { mu }
            | Optimizer::NaiveReg { mu, .. }
            | Optimizer::Ngd { mu } => *mu,
            Optimizer::Reg(cfg) => cfg.mu,
            Optimizer::Adam { beta1, .. } => *beta1,
            Optimizer::AdamW(cfg) => cfg.beta1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Optimizer::Reg(cfg) => cfg.validate(),
            Optimizer::AdamW(cfg) => cfg.validate(),
            Optimizer::Gdm { mu } | Optimizer::NaiveReg { mu, .. } | Optimizer::Ngd { mu } => {
                if (0.0..1.0).contains(mu) {
                    Ok(())
                } else {
                    Err(Error::ConfigInvalid("mu must lie in [0, 1)".into()))
                }
            }
            Optimizer::Adam { beta1, beta2, .. } => {
                if (0.0..1.0).contains(beta1) && (0.0..1.0).contains(beta2) {
                    Ok(())
                } else {
                    Err(Error::ConfigInvalid("betas must lie in [0, 1)".into()))
                }
            }
        }
    }
}
