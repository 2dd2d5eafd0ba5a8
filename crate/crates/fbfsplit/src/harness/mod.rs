//! Experiment harness: configs, drivers, guarantees, rate fits, and output
//! artifacts.
//!
//! The harness turns a JSON experiment description into runs, evaluates the
//! restricted merit of the averaged iterates at geometric checkpoints,
//! checks the matching guarantee, averages noisy runs over seeds, fits
//! log-log decay rates, and writes reproducible CSV traces plus a versioned
//! JSON summary and a gnuplot script.

pub mod bounds;
pub mod config;
pub mod experiment;
pub mod ratefit;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

use crate::gap::GapError;
use crate::solvers::SolverError;

pub use bounds::{
    deterministic_bound, record_bound, regime_label, residual_asymptote, stochastic_bound,
    variance_constant, BoundPoint, BoundReport, BOUND_SLACK,
};
pub use config::{BoxConfig, ConfigError, Experiment, ExperimentConfig, ProblemConfig};
pub use experiment::{
    compare_methods, evaluate_trace, run_experiment, run_seed, toy_experiments, write_comparison,
    write_experiment_outputs, Comparison, CompareRow, ExperimentOutput, FinalRow, RunArtifacts,
};
pub use ratefit::{fit_rate, RateFit, RateFitError, MIN_FIT_POINTS};
pub use report::{
    gap_column, plot_script, trace_csv, EvaluatedRecord, ExperimentSummary, RunSummary,
    SweepCheck, SweepCheckpoint, SweepSummary, SUMMARY_FORMAT_VERSION,
};

/// Errors from experiment driving (configuration errors are separate; see
/// [`ConfigError`]).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("merit evaluation: {0}")]
    Gap(#[from] GapError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("compared experiments must share a problem: {0}")]
    MismatchedProblems(String),
    #[error("nothing to compare: empty experiment list")]
    NothingToCompare,
}
