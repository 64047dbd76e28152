//! Experiment configuration: a single TOML file describing the problem,
//! the optimizer, the learning-rate schedule, and run parameters.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use reg_opt::error::{Error, Result};
use reg_opt::optim::{AdamWConfig, Optimizer, RegConfig};
use reg_opt::problems::{
    GroupedObjective, LogisticProblem, MlpProblem, QuadraticProblem, RosenbrockProblem,
};
use reg_opt::schedule::Schedule;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "REG_BENCH_OUT";

/// Problem selection and its construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ProblemConfig {
    Quadratic {
        m: usize,
        n: usize,
        #[serde(default)]
        structure: QuadraticStructure,
        #[serde(default)]
        problem_seed: u64,
    },
    Logistic {
        samples: usize,
        features: usize,
        #[serde(default = "one")]
        rows: usize,
        #[serde(default)]
        problem_seed: u64,
    },
    Mlp {
        widths: (usize, usize, usize),
        samples: usize,
        #[serde(default)]
        problem_seed: u64,
    },
    Rosenbrock {
        m: usize,
        n: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticStructure {
    Identity,
    #[default]
    Random,
}

impl ProblemConfig {
    pub fn build(&self) -> Result<Box<dyn GroupedObjective>> {
        Ok(match *self {
            ProblemConfig::Quadratic {
                m,
                n,
                structure,
                problem_seed,
            } => match structure {
                QuadraticStructure::Identity => Box::new(QuadraticProblem::identity(m, n)),
                QuadraticStructure::Random => {
                    Box::new(QuadraticProblem::random(m, n, problem_seed))
                }
            },
            ProblemConfig::Logistic {
                samples,
                features,
                rows,
                problem_seed,
            } => Box::new(LogisticProblem::synthetic(
                samples,
                features,
                rows,
                problem_seed,
            )?),
            ProblemConfig::Mlp {
                widths,
                samples,
                problem_seed,
            } => Box::new(MlpProblem::new(
                (widths.0, widths.1, widths.2),
                samples,
                problem_seed,
            )?),
            ProblemConfig::Rosenbrock { m, n } => Box::new(RosenbrockProblem::new(m, n)?),
        })
    }
}

/// Hybrid dispatch: named groups stepped by AdamW, the rest by the
/// regularized rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridSpec {
    pub reg: RegConfig,
    pub adamw: AdamWConfig,
    #[serde(default)]
    pub adamw_groups: Vec<String>,
}

/// Parsed optimizer section.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerSetup {
    Single { alpha: f64, optimizer: Optimizer },
    Hybrid(HybridSpec),
}

impl OptimizerSetup {
    fn from_toml(value: &toml::Value) -> Result<Self> {
        let name = value
            .get("name")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::ConfigInvalid("optimizer section needs a name".into()))?;
        if name == "hybrid" {
            let spec: HybridSpec = value
                .clone()
                .try_into()
                .map_err(|e| Error::ConfigInvalid(format!("bad hybrid optimizer: {e}")))?;
            return Ok(OptimizerSetup::Hybrid(spec));
        }
        let optimizer: Optimizer = value
            .clone()
            .try_into()
            .map_err(|e| Error::ConfigInvalid(format!("bad optimizer section: {e}")))?;
        let alpha = match optimizer.base_alpha() {
            Some(alpha) => alpha,
            None => value
                .get("alpha")
                .and_then(|v| v.as_float())
                .ok_or_else(|| {
                    Error::ConfigInvalid(format!("optimizer '{name}' needs an alpha"))
                })?,
        };
        Ok(OptimizerSetup::Single { alpha, optimizer })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OptimizerSetup::Single { alpha, optimizer } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::ConfigInvalid("alpha must be positive".into()));
                }
                optimizer.validate()
            }
            OptimizerSetup::Hybrid(spec) => {
                spec.reg.validate()?;
                spec.adamw.validate()
            }
        }
    }

    /// Momentum-style coefficient used by the Lyapunov diagnostic.
    pub fn momentum_coeff(&self) -> f64 {
        match self {
            OptimizerSetup::Single { optimizer, .. } => optimizer.momentum_coeff(),
            OptimizerSetup::Hybrid(spec) => spec.reg.mu,
        }
    }

    pub fn base_alpha(&self) -> f64 {
        match self {
            OptimizerSetup::Single { alpha, .. } => *alpha,
            OptimizerSetup::Hybrid(spec) => spec.reg.alpha,
        }
    }

    /// Configuration advisories worth printing before a run.
    pub fn warnings(&self) -> Vec<String> {
        match self {
            OptimizerSetup::Single {
                optimizer: Optimizer::Reg(cfg),
                ..
            } => cfg.warnings(),
            OptimizerSetup::Hybrid(spec) => spec.reg.warnings(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub iterations: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_run_name")]
    pub name: String,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Gradient Frobenius threshold for the iterations-to-threshold sweep
    /// metric.
    #[serde(default = "default_threshold")]
    pub threshold_grad: f64,
}

fn default_seed() -> u64 {
    42
}

fn default_run_name() -> String {
    "run".to_string()
}

fn default_threshold() -> f64 {
    1e-6
}

/// `[sweep.grid]`: parameter name to list of values, expanded as a
/// cartesian product.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SweepSection {
    pub grid: toml::value::Table,
}

#[derive(Debug, Clone, Deserialize)]
struct FileConfig {
    problem: ProblemConfig,
    optimizer: toml::Value,
    #[serde(default)]
    schedule: Option<Schedule>,
    run: RunSection,
    #[serde(default)]
    sweep: Option<SweepSection>,
}

/// A fully parsed experiment. Keeps the raw TOML tree for sweep patching
/// and the JSON snapshot recorded with every trajectory.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub optimizer: OptimizerSetup,
    pub schedule: Schedule,
    pub run: RunSection,
    pub sweep: Option<SweepSection>,
    pub toml: toml::Value,
    pub raw: serde_json::Value,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = text
            .parse()
            .map_err(|e| Error::ConfigInvalid(format!("TOML parse error: {e}")))?;
        ExperimentConfig::from_toml_value(value)
    }

    pub fn from_toml_value(value: toml::Value) -> Result<Self> {
        let file: FileConfig = value
            .clone()
            .try_into()
            .map_err(|e| Error::ConfigInvalid(format!("bad config: {e}")))?;
        let optimizer = OptimizerSetup::from_toml(&file.optimizer)?;
        let raw = serde_json::to_value(&value)
            .map_err(|e| Error::ConfigInvalid(format!("config snapshot failed: {e}")))?;
        let cfg = ExperimentConfig {
            problem: file.problem,
            optimizer,
            schedule: file.schedule.unwrap_or_default(),
            run: file.run,
            sweep: file.sweep,
            toml: value,
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.iterations < 1 {
            return Err(Error::ConfigInvalid("iterations must be >= 1".into()));
        }
        self.optimizer.validate()?;
        self.schedule.validate()?;
        // Problem construction itself validates sizes; build eagerly so bad
        // configs fail before any run starts.
        let objective = self.problem.build()?;
        if let OptimizerSetup::Hybrid(spec) = &self.optimizer {
            let names = objective.group_names();
            for wanted in &spec.adamw_groups {
                if !names.contains(wanted) {
                    return Err(Error::ConfigInvalid(format!(
                        "adamw group '{wanted}' not among parameter groups {names:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Output directory: CLI flag, then `[run].out_dir`, then the
    /// environment default, then the working directory.
    pub fn resolve_out_dir(&self, cli: Option<&PathBuf>) -> PathBuf {
        if let Some(dir) = cli {
            return dir.clone();
        }
        if let Some(dir) = &self.run.out_dir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use reg_opt::linalg::NormOrder;

    const BASE: &str = r#"
        [problem]
        name = "quadratic"
        m = 4
        n = 8

        [optimizer]
        name = "reg"
        alpha = 0.1
        p = "2"

        [run]
        iterations = 50
    "#;

    #[test]
    fn parses_a_minimal_config_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(cfg.run.seed, 42);
        assert_eq!(cfg.run.name, "run");
        assert_eq!(cfg.schedule, Schedule::Constant);
        match &cfg.optimizer {
            OptimizerSetup::Single {
                alpha,
                optimizer: Optimizer::Reg(reg),
            } => {
                assert_eq!(*alpha, 0.1);
                assert_eq!(reg.mu, 0.9);
                assert_eq!(reg.p, NormOrder::L2);
                assert_eq!(reg.rho_target, 0.2);
            }
            other => panic!("unexpected optimizer {other:?}"),
        }
    }

    #[test]
    fn parses_every_single_optimizer_kind() {
        for (name, extra) in [
            ("gdm", ""),
            ("naive_reg", "p = \"inf\""),
            ("ngd", ""),
            ("adam", ""),
            ("adamw", "lambda = 0.01"),
        ] {
            let text = format!(
                r#"
                [problem]
                name = "rosenbrock"
                m = 2
                n = 3
                [optimizer]
                name = "{name}"
                alpha = 0.05
                mu = 0.8
                {extra}
                [run]
                iterations = 5
                "#
            );
            let cfg = ExperimentConfig::from_toml_str(&text)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.optimizer.base_alpha(), 0.05, "{name}");
        }
    }

    #[test]
    fn parses_hybrid_and_checks_group_names() {
        let text = r#"
            [problem]
            name = "mlp"
            widths = [4, 8, 2]
            samples = 64

            [optimizer]
            name = "hybrid"
            adamw_groups = ["layer2"]

            [optimizer.reg]
            alpha = 0.1

            [optimizer.adamw]
            alpha = 0.001

            [run]
            iterations = 10
        "#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert!(matches!(cfg.optimizer, OptimizerSetup::Hybrid(_)));

        let bad = text.replace("layer2", "embedding");
        let err = ExperimentConfig::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("embedding"));
    }

    #[test]
    fn rejects_broken_configs() {
        assert!(ExperimentConfig::from_toml_str("not toml [").is_err());
        let no_alpha = BASE.replace("alpha = 0.1", "");
        assert!(ExperimentConfig::from_toml_str(&no_alpha).is_err());
        let zero_iters = BASE.replace("iterations = 50", "iterations = 0");
        assert!(ExperimentConfig::from_toml_str(&zero_iters).is_err());
        let bad_schedule = format!(
            "{BASE}\n[schedule]\nkind = \"cosine_with_warmup\"\nwarmup_fraction = 1.5\n"
        );
        assert!(ExperimentConfig::from_toml_str(&bad_schedule).is_err());
    }

    #[test]
    fn cosine_schedule_round_trips() {
        let text = format!(
            "{BASE}\n[schedule]\nkind = \"cosine_with_warmup\"\nwarmup_fraction = 0.05\n"
        );
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(
            cfg.schedule,
            Schedule::CosineWithWarmup {
                warmup_fraction: 0.05
            }
        );
    }
}
