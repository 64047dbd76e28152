//! Executable checks of the convergence results the step rules are built
//! around: the equilibration minimality statements, the closed-form RMS
//! identity, the zero-momentum descent argument, and the finite-horizon
//! momentum bound with its per-step Lyapunov inequalities.

mod descent;
mod equilibration;
mod finite_n;
mod gradcheck;
mod rms_check;

pub use descent::{
    check_descent_mu0, check_gamma_bounds, commensurate_start, gamma_ratio, norm_equivalence,
    run_naive_mu0, NormEquivalence,
};
pub use equilibration::check_equilibration_minimality;
pub use finite_n::check_finite_n_bound;
pub use gradcheck::{central_difference_grads, finite_diff_gradient_audit, GradAudit};
pub use rms_check::check_rms_theorem;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the statement a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    T1a,
    T1b,
    T2,
    T3,
    T4,
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TheoremId::T1a => "t1a",
            TheoremId::T1b => "t1b",
            TheoremId::T2 => "t2",
            TheoremId::T3 => "t3",
            TheoremId::T4 => "t4",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1a" => Ok(TheoremId::T1a),
            "t1b" => Ok(TheoremId::T1b),
            "t2" => Ok(TheoremId::T2),
            "t3" => Ok(TheoremId::T3),
            "t4" => Ok(TheoremId::T4),
            other => Err(Error::ConfigInvalid(format!(
                "unknown theorem id '{other}' (expected t1a, t1b, t2, t3 or t4)"
            ))),
        }
    }
}

/// Outcome of one check: an observed scalar against its bound. `passed`
/// holds exactly when `observed <= bound * (1 + tol)` with the tolerance
/// recorded in `config`.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub seed: u64,
    pub config: serde_json::Value,
    /// In-memory link to the trajectory behind the numbers; not part of the
    /// serialized report.
    #[serde(skip)]
    pub trajectory: Option<RunRecord>,
}

impl TheoremReport {
    pub fn new(
        theorem_id: TheoremId,
        observed: f64,
        bound: f64,
        rel_tol: f64,
        seed: u64,
        config: serde_json::Value,
    ) -> Self {
        let passed = le_with_rtol(observed, bound, rel_tol);
        TheoremReport {
            theorem_id,
            passed,
            observed,
            bound,
            margin: bound - observed,
            seed,
            config,
            trajectory: None,
        }
    }

    pub fn with_trajectory(mut self, record: RunRecord) -> Self {
        self.trajectory = Some(record);
        self
    }

    /// Compact JSON with the stable key order
    /// `{theorem_id, passed, observed, bound, margin, seed, config}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is always serializable")
    }
}

/// `lhs <= rhs` up to a relative slack on the comparison scale.
pub(crate) fn le_with_rtol(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * rhs.abs().max(lhs.abs()).max(1.0)
}

/// Check skipped because its preconditions do not hold; never counted as a
/// failure.
#[derive(Debug, Clone)]
pub enum CheckOutcome {
    Report(TheoremReport),
    Skipped { reason: String },
}

/// Per-iteration trajectory of a run: objective, gradient norms, the row
/// norm sums `g_k` and `h_k`, the Lyapunov value, the applied update RMS,
/// and the learning rate in effect.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub name: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub f: Vec<f64>,
    pub grad_fro: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub lyapunov: Vec<f64>,
    pub update_rms: Vec<f64>,
    pub lr: Vec<f64>,
}

impl RunRecord {
    pub fn new(name: impl Into<String>, seed: u64, config: serde_json::Value) -> Self {
        RunRecord {
            name: name.into(),
            seed,
            config,
            f: Vec::new(),
            grad_fro: Vec::new(),
            g: Vec::new(),
            h: Vec::new(),
            lyapunov: Vec::new(),
            update_rms: Vec::new(),
            lr: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        f: f64,
        grad_fro: f64,
        g: f64,
        h: f64,
        lyapunov: f64,
        update_rms: f64,
        lr: f64,
    ) {
        self.f.push(f);
        self.grad_fro.push(grad_fro);
        self.g.push(g);
        self.h.push(h);
        self.lyapunov.push(lyapunov);
        self.update_rms.push(update_rms);
        self.lr.push(lr);
    }

    /// All arrays share the iteration count and hold finite values.
    pub fn validate(&self) -> Result<()> {
        let n = self.f.len();
        let lens = [
            self.grad_fro.len(),
            self.g.len(),
            self.h.len(),
            self.lyapunov.len(),
            self.update_rms.len(),
            self.lr.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::ConfigInvalid(format!(
                "ragged trajectory arrays in run '{}'",
                self.name
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if ![
            &self.f,
            &self.grad_fro,
            &self.g,
            &self.h,
            &self.lyapunov,
            &self.update_rms,
            &self.lr,
        ]
        .into_iter()
        .all(|v| finite(v))
        {
            return Err(Error::ConfigInvalid(format!(
                "non-finite trajectory entry in run '{}'",
                self.name
            )));
        }
        Ok(())
    }

    /// Fixed-schema CSV: `iter,f,grad_fro,g_k,h_k,update_rms,lr`.
    pub fn csv_string(&self) -> String {
        let mut out = String::from("iter,f,grad_fro,g_k,h_k,update_rms,lr\n");
        for k in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                k,
                self.f[k],
                self.grad_fro[k],
                self.g[k],
                self.h[k],
                self.update_rms[k],
                self.lr[k]
            ));
        }
        out
    }
}

/// Stream-split a base seed deterministically (splitmix64 over the pair).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
