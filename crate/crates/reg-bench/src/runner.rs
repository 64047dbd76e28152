//! Deterministic single-experiment execution and CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use reg_opt::error::Result;
use reg_opt::linalg::Matrix;
use reg_opt::optim::{adamw_step, reg_step_with_lr, OptState, RegConfig, StepStats};
use reg_opt::verify::RunRecord;

use crate::config::{ExperimentConfig, OptimizerSetup};

/// Scalar digest of a finished run, used for sweep summaries.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub final_f: f64,
    pub min_f: f64,
    pub min_g: f64,
    /// First iteration whose gradient Frobenius norm fell below the
    /// configured threshold, or -1.
    pub iters_to_threshold: i64,
    pub diverged: bool,
}

pub struct RunOutput {
    pub record: RunRecord,
    pub summary: RunSummary,
}

/// Run one experiment to completion. The trajectory is fully determined by
/// the config (problem seeds, run seed, optimizer, schedule); repeated calls
/// produce identical records.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let objective = cfg.problem.build()?;
    let group_names = objective.group_names();
    let mut params = objective.init(cfg.run.seed);
    let mut states: Vec<OptState> = params.iter().map(OptState::for_param).collect();
    let sizes: Vec<f64> = params
        .iter()
        .map(|w| (w.rows() * w.cols()) as f64)
        .collect();
    let total_size: f64 = sizes.iter().sum();

    let mu = cfg.optimizer.momentum_coeff();
    let base_alpha = cfg.optimizer.base_alpha();
    let iters = cfg.run.iterations;

    let mut record = RunRecord::new(cfg.run.name.clone(), cfg.run.seed, cfg.raw.clone());
    let mut min_f = f64::INFINITY;
    let mut min_g = f64::INFINITY;
    let mut final_f = f64::INFINITY;
    let mut iters_to_threshold = -1i64;
    let mut diverged = false;

    for k in 0..iters {
        let f = objective.eval(&params);
        let grads = objective.grads(&params);
        let grad_fro = grads
            .iter()
            .map(|g| g.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt();
        if !(f.is_finite() && grad_fro.is_finite()) {
            diverged = true;
            final_f = f;
            break;
        }
        let g_sum: f64 = grads.iter().map(|g| g.row_l2_sum()).sum();
        final_f = f;
        min_f = min_f.min(f);
        min_g = min_g.min(g_sum);
        if iters_to_threshold < 0 && grad_fro < cfg.run.threshold_grad {
            iters_to_threshold = k as i64;
        }

        let factor = cfg.schedule.lr(k, iters, 1.0);
        let alpha_k = base_alpha * factor;
        let momentum_energy: f64 = states
            .iter()
            .map(|s| s.momentum.frobenius_norm().powi(2))
            .sum();
        let lyap_coeff = if mu > 0.0 {
            alpha_k * mu / (2.0 * (1.0 - mu))
        } else {
            0.0
        };
        let lyapunov = f + lyap_coeff * momentum_energy;

        let mut h_sum = 0.0;
        let mut rms_sq_weighted = 0.0;
        for idx in 0..params.len() {
            let stats = step_group(
                cfg,
                &group_names[idx],
                &mut params[idx],
                &grads[idx],
                &mut states[idx],
                factor,
            )?;
            h_sum += stats.momentum_row_norm_sum;
            rms_sq_weighted += stats.update_rms * stats.update_rms * sizes[idx];
        }
        let update_rms = (rms_sq_weighted / total_size).sqrt();
        record.push(f, grad_fro, g_sum, h_sum, lyapunov, update_rms, alpha_k);
    }

    Ok(RunOutput {
        record,
        summary: RunSummary {
            final_f,
            min_f,
            min_g,
            iters_to_threshold,
            diverged,
        },
    })
}

fn step_group(
    cfg: &ExperimentConfig,
    group_name: &str,
    w: &mut Matrix,
    grad: &Matrix,
    state: &mut OptState,
    schedule_factor: f64,
) -> Result<StepStats> {
    match &cfg.optimizer {
        OptimizerSetup::Single { alpha, optimizer } => optimizer
            .step(w, grad, state, alpha * schedule_factor)
            .map_err(|e| e.in_group(group_name)),
        OptimizerSetup::Hybrid(spec) => {
            let result = if spec.adamw_groups.iter().any(|g| g == group_name) {
                adamw_step(
                    w,
                    grad,
                    state,
                    spec.adamw.alpha * schedule_factor,
                    spec.adamw.beta1,
                    spec.adamw.beta2,
                    spec.adamw.epsilon,
                    spec.adamw.lambda,
                )
            } else {
                let reg: &RegConfig = &spec.reg;
                reg_step_with_lr(w, grad, state, reg, reg.alpha * schedule_factor)
            };
            result.map_err(|e| e.in_group(group_name))
        }
    }
}

/// Write `contents` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Write the trajectory CSV next to the configured output directory and
/// return its path.
pub fn write_record_csv(record: &RunRecord, out_dir: &Path, stem: &str) -> Result<PathBuf> {
    let path = out_dir.join(format!("{stem}.csv"));
    write_atomic(&path, &record.csv_string())?;
    Ok(path)
}

/// Convenience for tests and the verify command: run a config given as TOML
/// text.
pub fn run_toml(text: &str) -> Result<RunOutput> {
    run_experiment(&ExperimentConfig::from_toml_str(text)?)
}
