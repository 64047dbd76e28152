//! Learning-rate schedules for the run harness: constant, or linear warmup
//! into a cosine decay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    /// Linear ramp over the first `warmup_fraction` of the run, then cosine
    /// decay from the base rate down to zero at the final iteration.
    CosineWithWarmup { warmup_fraction: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Constant
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if let Schedule::CosineWithWarmup { warmup_fraction } = self {
            if !(0.0..1.0).contains(warmup_fraction) {
                return Err(Error::ConfigInvalid(
                    "warmup_fraction must lie in [0, 1)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Learning rate at iteration `iter` of a run of `total` iterations.
    pub fn lr(&self, iter: usize, total: usize, base: f64) -> f64 {
        match self {
            Schedule::Constant => base,
            Schedule::CosineWithWarmup { warmup_fraction } => {
                let warmup = (warmup_fraction * total as f64).floor() as usize;
                if warmup > 0 && iter < warmup {
                    return base * iter as f64 / warmup as f64;
                }
                let span = total.saturating_sub(1 + warmup);
                if span == 0 {
                    return base;
                }
                let progress = (iter - warmup) as f64 / span as f64;
                base * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos())
            }
        }
    }
}
