//! Benchmark and verification CLI for the row/column-scaled optimizers.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 for
//! configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reg_bench::config::ExperimentConfig;
use reg_bench::plot::plot_csvs;
use reg_bench::runner::{run_experiment, write_record_csv};
use reg_bench::sweep::run_sweep;
use reg_bench::verifycmd::{run_selected, VerifyItem};
use reg_opt::error::Result;
use reg_opt::verify::TheoremId;

#[derive(Parser)]
#[command(
    name = "reg-bench",
    about = "Run, sweep, verify and plot matrix-optimizer experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trajectory CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override [run].seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (falls back to [run].out_dir, then $REG_BENCH_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand [sweep.grid] and run every point, writing per-point CSVs and a
    /// summary CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the theorem checks and print one JSON report per line.
    Verify {
        /// t1a, t1b, t2, t3, t4 or all.
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Render trajectory CSVs as a static SVG (objective and g_k panels).
    Plot {
        #[arg(long)]
        out: PathBuf,
        /// Logarithmic y axes (non-positive points are dropped).
        #[arg(long)]
        log_y: bool,
        /// Trajectory CSV files.
        #[arg(required = true)]
        csvs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut value: toml::Value = text
        .parse()
        .map_err(|e| reg_opt::Error::ConfigInvalid(format!("TOML parse error: {e}")))?;
    if let Some(seed) = seed {
        let table = value
            .get_mut("run")
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| reg_opt::Error::ConfigInvalid("config needs a [run] section".into()))?;
        table.insert("seed".into(), toml::Value::Integer(seed as i64));
    }
    ExperimentConfig::from_toml_value(value)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let cfg = load_config(&config, seed)?;
            for warning in cfg.optimizer.warnings() {
                eprintln!("warning: {warning}");
            }
            let out_dir = cfg.resolve_out_dir(out.as_ref());
            let output = run_experiment(&cfg)?;
            let path = write_record_csv(&output.record, &out_dir, &cfg.run.name)?;
            let s = output.summary;
            println!(
                "run '{}': {} iterations, final f = {}, min g_k = {}{}",
                cfg.run.name,
                output.record.len(),
                s.final_f,
                s.min_g,
                if s.diverged { " (diverged)" } else { "" }
            );
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, seed, out } => {
            let cfg = load_config(&config, seed)?;
            let out_dir = cfg.resolve_out_dir(out.as_ref());
            let outcome = run_sweep(&cfg, &out_dir)?;
            for point in &outcome.results {
                let labels: Vec<String> = point
                    .values
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                println!(
                    "point {:03} [{}]: final f = {}, min g_k = {}",
                    point.index,
                    labels.join(", "),
                    point.summary.final_f,
                    point.summary.min_g
                );
            }
            println!("wrote {}", outcome.summary_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { theorem, seed } => {
            let selection = match theorem.as_str() {
                "all" => None,
                other => Some(other.parse::<TheoremId>()?),
            };
            let items = run_selected(selection, seed)?;
            let mut all_passed = true;
            for item in &items {
                match item {
                    VerifyItem::Report(report) => {
                        println!("{}", report.to_json());
                        all_passed &= report.passed;
                    }
                    VerifyItem::Skipped { theorem, reason } => {
                        eprintln!("skipped {theorem}: {reason}");
                    }
                }
            }
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Plot { out, log_y, csvs } => {
            plot_csvs(&csvs, &out, log_y)?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
