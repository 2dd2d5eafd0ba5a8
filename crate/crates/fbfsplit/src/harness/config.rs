//! Experiment descriptions: the JSON schema the CLI consumes and its
//! validated, resolved form.
//!
//! A config names a problem (operator + regularizer), a solver, a step
//! schedule, an iteration budget, seeds, a start point, and the compact box
//! the merit is restricted to. Optional knobs select the merit evaluation
//! method, the checkpoint schedule, raw-iterate merit reporting, the rate-fit
//! window, and an output directory. Unknown fields are rejected so typos
//! fail loudly instead of silently running defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gap::{GapError, GapEvaluator, GapMethod};
use crate::operators::{BilinearSaddleOperator, OperatorSpec, OperatorSpecError};
use crate::problems::{Problem, ProblemError};
use crate::regularizers::{RegularizerSpec, RegularizerSpecError};
use crate::rng::derive_seed;
use crate::solvers::{RecordSchedule, RunConfig, SolverKind, StepSchedule};
use crate::space::{CompactBox, Point, SpaceError};

/// Default rate-fit window: the last two decades of the run (clamped to
/// start no earlier than iteration 1).
fn default_rate_window(iterations: u64) -> (u64, u64) {
    ((iterations / 100).max(1), iterations)
}

fn default_records() -> RecordSchedule {
    RecordSchedule::Geometric
}

/// Problem block of a config: both halves are the same JSON shapes used for
/// standalone operator / regularizer files.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub operator: OperatorSpec,
    pub regularizer: RegularizerSpec,
}

/// Axis-aligned box in config form.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// One experiment as read from JSON. See [`ExperimentConfig::resolve`].
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: SolverKind,
    pub schedule: StepSchedule,
    pub iterations: u64,
    /// Seed entries; each is mixed with the master seed to derive the
    /// stream seed of its run. Must be nonempty.
    pub seeds: Vec<u64>,
    pub z0: Vec<f64>,
    /// Box the merit is restricted to (also the source of the diameter in
    /// the guarantees).
    pub gap_box: BoxConfig,
    #[serde(default)]
    pub gap_method: GapMethod,
    #[serde(default = "default_records")]
    pub records: RecordSchedule,
    /// Also evaluate the merit of the raw (non-averaged) iterate at each
    /// checkpoint, in an extra trailing CSV column.
    #[serde(default)]
    pub raw_iterate_gap: bool,
    /// Inclusive iteration window for the log-log rate fit.
    #[serde(default)]
    pub rate_window: Option<(u64, u64)>,
    /// Output directory for CSV traces and the JSON summary.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Name used in output file names and comparison tables; defaults to
    /// the method name.
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("operator: {0}")]
    Operator(#[from] OperatorSpecError),
    #[error("regularizer: {0}")]
    Regularizer(#[from] RegularizerSpecError),
    #[error("problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("gap box: {0}")]
    Box(#[from] SpaceError),
    #[error("merit setup: {0}")]
    Gap(#[from] GapError),
    #[error("seeds list must not be empty")]
    EmptySeeds,
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("z0 has dim {found}, problem has dim {expected}")]
    StartDimension { expected: usize, found: usize },
    #[error("z0 must be finite")]
    NonFiniteStart,
    #[error("rate window [{0}, {1}] is empty, reversed, or starts at 0")]
    BadRateWindow(u64, u64),
}

/// A config after validation: concrete problem, box, and start point.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub label: String,
    pub problem: Problem<BilinearSaddleOperator>,
    pub gap_box: CompactBox,
    pub gap_method: GapMethod,
    pub z0: Point,
    pub solver: SolverKind,
    pub schedule: StepSchedule,
    pub iterations: u64,
    pub seeds: Vec<u64>,
    pub records: RecordSchedule,
    pub raw_iterate_gap: bool,
    pub rate_window: (u64, u64),
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses a config from JSON text.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads and parses a config file.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Validates the config and builds the concrete experiment.
    pub fn resolve(&self) -> Result<Experiment, ConfigError> {
        if self.iterations == 0 {
            return Err(ConfigError::ZeroIterations);
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::EmptySeeds);
        }
        let operator = self.problem.operator.resolve()?;
        let split = operator.split();
        let regularizer = self
            .problem
            .regularizer
            .resolve(split.dim(), Some(split))?;
        let problem = Problem::bilinear(operator, regularizer)?;
        let gap_box = CompactBox::new(self.gap_box.lower.clone(), self.gap_box.upper.clone())?;
        if self.z0.len() != problem.dim() {
            return Err(ConfigError::StartDimension {
                expected: problem.dim(),
                found: self.z0.len(),
            });
        }
        let z0 = Point::checked(self.z0.clone()).map_err(|_| ConfigError::NonFiniteStart)?;
        let rate_window = match self.rate_window {
            Some((lo, hi)) => {
                if lo == 0 || lo > hi {
                    return Err(ConfigError::BadRateWindow(lo, hi));
                }
                (lo, hi)
            }
            None => default_rate_window(self.iterations),
        };
        let experiment = Experiment {
            label: self
                .label
                .clone()
                .unwrap_or_else(|| self.solver.method.name().to_string()),
            problem,
            gap_box,
            gap_method: self.gap_method,
            z0,
            solver: self.solver,
            schedule: self.schedule,
            iterations: self.iterations,
            seeds: self.seeds.clone(),
            records: self.records.clone(),
            raw_iterate_gap: self.raw_iterate_gap,
            rate_window,
            out: self.out.clone(),
        };
        // Fail now, not mid-run, if the merit evaluator cannot be built
        // (box/problem dimension mismatch, infeasible axis, bad lattice).
        GapEvaluator::new(
            &experiment.problem,
            experiment.gap_box.clone(),
            experiment.gap_method,
        )?;
        Ok(experiment)
    }
}

impl Experiment {
    /// Config-form view of this experiment (used by summaries and for
    /// checking that compared experiments share a problem).
    pub fn problem_fingerprint(&self) -> serde_json::Value {
        serde_json::json!({
            "operator": OperatorSpec::from_operator(self.problem.operator()),
            "regularizer": RegularizerSpec::from_regularizer(self.problem.regularizer()),
            "gap_box": { "lower": self.gap_box.lower(), "upper": self.gap_box.upper() },
        })
    }

    /// Solver configuration of the run for seed entry `entry` under
    /// `master`. The stream seed mixes both so distinct entries and distinct
    /// master seeds each give independent streams.
    pub fn run_config(&self, entry: u64, master: u64) -> RunConfig {
        RunConfig {
            kind: self.solver,
            schedule: self.schedule,
            iterations: self.iterations,
            seed: derive_seed(master, entry),
            records: self.records.clone(),
        }
    }

    pub fn evaluator(&self) -> GapEvaluator<'_> {
        GapEvaluator::new(&self.problem, self.gap_box.clone(), self.gap_method)
            .expect("evaluator construction was validated at resolve time")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Method;

    fn toy_config_json() -> String {
        r#"{
            "problem": {
                "operator": { "d": 1, "n": 1, "A": [1.0], "b": [0.0], "c": [0.0], "L": 1.0 },
                "regularizer": { "type": "separable",
                                 "f": { "type": "l1", "kappa": 0.01 },
                                 "h": { "type": "box", "lower": [-1.0], "upper": [1.0] } }
            },
            "solver": { "method": { "name": "fbf" }, "mode": { "kind": "deterministic" } },
            "schedule": { "kind": "constant", "alpha": 1.0 },
            "iterations": 1000,
            "seeds": [0],
            "z0": [1.0, 1.0],
            "gap_box": { "lower": [-1.0, -1.0], "upper": [1.0, 1.0] }
        }"#
        .to_string()
    }

    #[test]
    fn toy_config_resolves() {
        let cfg = ExperimentConfig::from_json(&toy_config_json()).unwrap();
        let exp = cfg.resolve().unwrap();
        assert_eq!(exp.label, "fbf");
        assert_eq!(exp.problem.dim(), 2);
        assert_eq!(exp.gap_box.diameter_squared(), 8.0);
        assert_eq!(exp.rate_window, (10, 1000));
        assert_eq!(exp.solver.method, Method::Fbf);
        assert!(!exp.raw_iterate_gap);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = toy_config_json().replace("\"iterations\"", "\"iterationz\"");
        let err = ExperimentConfig::from_json(&bad).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn empty_seeds_rejected() {
        let bad = toy_config_json().replace("\"seeds\": [0]", "\"seeds\": []");
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(cfg.resolve().unwrap_err(), ConfigError::EmptySeeds));
    }

    #[test]
    fn wrong_z0_dimension_rejected() {
        let bad = toy_config_json().replace("\"z0\": [1.0, 1.0]", "\"z0\": [1.0]");
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(
            cfg.resolve().unwrap_err(),
            ConfigError::StartDimension {
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn infeasible_gap_box_rejected_at_resolve() {
        // Dual axis restricted to [-1, 1] by the regularizer, but the gap
        // box sits at [2, 3]: no feasible candidate on that axis.
        let bad = toy_config_json().replace(
            "\"gap_box\": { \"lower\": [-1.0, -1.0], \"upper\": [1.0, 1.0] }",
            "\"gap_box\": { \"lower\": [-1.0, 2.0], \"upper\": [1.0, 3.0] }",
        );
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(cfg.resolve().unwrap_err(), ConfigError::Gap(_)));
    }

    #[test]
    fn bad_rate_window_rejected() {
        let bad = toy_config_json().replace(
            "\"iterations\": 1000",
            "\"iterations\": 1000, \"rate_window\": [500, 100]",
        );
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(
            cfg.resolve().unwrap_err(),
            ConfigError::BadRateWindow(500, 100)
        ));
    }

    #[test]
    fn seed_mixing_depends_on_master_and_entry() {
        let cfg = ExperimentConfig::from_json(&toy_config_json()).unwrap();
        let exp = cfg.resolve().unwrap();
        let a = exp.run_config(0, 0).seed;
        let b = exp.run_config(1, 0).seed;
        let c = exp.run_config(0, 1).seed;
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, exp.run_config(0, 0).seed);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::from_json(&toy_config_json()).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(
            serde_json::to_value(&cfg).unwrap(),
            serde_json::to_value(&back).unwrap()
        );
    }
}
