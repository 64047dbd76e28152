//! Grid sweeps: expand a parameter grid over a base config, run every point
//! in a worker pool, and write one trajectory CSV per point plus a summary.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use reg_opt::error::{Error, Result};
use reg_opt::verify::derive_seed;

use crate::config::ExperimentConfig;
use crate::runner::{run_experiment, write_atomic, write_record_csv, RunSummary};

/// One expanded grid point: the parameter assignment and the patched config.
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<(String, toml::Value)>,
    pub config: ExperimentConfig,
}

pub struct SweepPointResult {
    pub index: usize,
    pub values: Vec<(String, String)>,
    pub summary: RunSummary,
    pub csv_path: PathBuf,
}

pub struct SweepOutcome {
    pub results: Vec<SweepPointResult>,
    pub summary_path: PathBuf,
}

/// Expand the `[sweep.grid]` table into the cartesian product of its value
/// lists. Bare keys patch the optimizer section; dotted keys (`run.seed`,
/// `schedule.warmup_fraction`, `optimizer.reg.alpha`) address the tree
/// explicitly, and `seed` is shorthand for `run.seed`.
pub fn expand_grid(base: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    let sweep = base
        .sweep
        .as_ref()
        .ok_or_else(|| Error::ConfigInvalid("sweep requires a [sweep.grid] section".into()))?;
    if sweep.grid.is_empty() {
        return Err(Error::ConfigInvalid("sweep grid is empty".into()));
    }
    let mut axes: Vec<(String, Vec<toml::Value>)> = Vec::new();
    for (key, value) in &sweep.grid {
        let list = value
            .as_array()
            .ok_or_else(|| {
                Error::ConfigInvalid(format!("grid entry '{key}' must be a list of values"))
            })?
            .clone();
        if list.is_empty() {
            return Err(Error::ConfigInvalid(format!("grid entry '{key}' is empty")));
        }
        axes.push((key.clone(), list));
    }

    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let seed_swept = axes.iter().any(|(k, _)| k == "seed" || k == "run.seed");
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut remainder = index;
        let mut values = Vec::with_capacity(axes.len());
        let mut patched = base.toml.clone();
        for (key, list) in &axes {
            let pick = remainder % list.len();
            remainder /= list.len();
            values.push((key.clone(), list[pick].clone()));
            set_path(&mut patched, key, list[pick].clone())?;
        }
        // Remove the sweep table and give each point its own name and
        // derived seed stream.
        if let Some(table) = patched.as_table_mut() {
            table.remove("sweep");
        }
        set_path(
            &mut patched,
            "run.name",
            toml::Value::String(format!("{}_{index:03}", base.run.name)),
        )?;
        if !seed_swept {
            // TOML integers are i64; keep the derived stream in range.
            let point_seed = derive_seed(base.run.seed, index as u64) & (i64::MAX as u64);
            set_path(
                &mut patched,
                "run.seed",
                toml::Value::Integer(point_seed as i64),
            )?;
        }
        let config = ExperimentConfig::from_toml_value(patched)?;
        points.push(SweepPoint {
            index,
            values,
            config,
        });
    }
    Ok(points)
}

/// Route a grid key to its spot in the config tree.
fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let path: Vec<&str> = match key {
        "seed" => vec!["run", "seed"],
        k if k.contains('.') => k.split('.').collect(),
        k => vec!["optimizer", k],
    };
    let mut cursor = root;
    for segment in &path[..path.len() - 1] {
        let table = cursor
            .as_table_mut()
            .ok_or_else(|| Error::ConfigInvalid(format!("'{key}' does not address a table")))?;
        cursor = table
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = cursor
        .as_table_mut()
        .ok_or_else(|| Error::ConfigInvalid(format!("'{key}' does not address a table")))?;
    table.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

/// Run every grid point in parallel, then write `<name>_summary.csv` with
/// one row per point in grid order.
pub fn run_sweep(base: &ExperimentConfig, out_dir: &Path) -> Result<SweepOutcome> {
    let points = expand_grid(base)?;
    let mut results: Vec<SweepPointResult> = points
        .into_par_iter()
        .map(|point| {
            let output = run_experiment(&point.config)?;
            let csv_path = write_record_csv(&output.record, out_dir, &point.config.run.name)?;
            Ok(SweepPointResult {
                index: point.index,
                values: point
                    .values
                    .iter()
                    .map(|(k, v)| (k.clone(), plain_value(v)))
                    .collect(),
                summary: output.summary,
                csv_path,
            })
        })
        .collect::<Result<_>>()?;
    results.sort_by_key(|r| r.index);

    let keys: Vec<String> = results
        .first()
        .map(|r| r.values.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut csv = String::from("index");
    for key in &keys {
        csv.push(',');
        csv.push_str(key);
    }
    csv.push_str(",final_f,min_f,min_g_k,iters_to_threshold\n");
    for r in &results {
        csv.push_str(&r.index.to_string());
        for (_, v) in &r.values {
            csv.push(',');
            csv.push_str(v);
        }
        csv.push_str(&format!(
            ",{},{},{},{}\n",
            r.summary.final_f, r.summary.min_f, r.summary.min_g, r.summary.iters_to_threshold
        ));
    }
    let summary_path = out_dir.join(format!("{}_summary.csv", base.run.name));
    write_atomic(&summary_path, &csv)?;
    Ok(SweepOutcome {
        results,
        summary_path,
    })
}

/// Render a grid value for CSV cells (strings unquoted).
fn plain_value(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
