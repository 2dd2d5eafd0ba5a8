//! Splitting methods for monotone inclusions `0 in F(w) + subdifferential r(w)`.
//!
//! All methods share one driver ([`run`]) and differ only in their per-step
//! state machine:
//!
//! * `Fbf` — forward step, prox, then a correcting forward step; two fresh
//!   operator evaluations per iteration.
//! * `Fbfp` — same scheme but the first forward step reuses the evaluation
//!   from the previous iteration; one fresh evaluation per iteration (plus one
//!   at the start), halving oracle cost at the price of a halved step cap.
//! * `Eg` — extragradient: both the trial and update steps go through the
//!   prox; two fresh evaluations per iteration.
//! * `Egp` — extragradient with the trial-step evaluation recycled, one fresh
//!   evaluation per iteration (plus one at the start).
//! * `Pgda` — proximal gradient descent/ascent on the primal/dual blocks,
//!   alternating by default or simultaneous behind a flag. No step cap and no
//!   guarantee: it is the cautionary baseline.
//!
//! In stochastic mode (`Fbf`/`Fbfp` only) every evaluation is replaced by an
//! independent noisy sample; the recycled estimate in `Fbfp` is reused by
//! value, never re-sampled. Step-size caps in stochastic mode are hard errors
//! because the variance constants in the companion bounds are only valid under
//! them; deterministic caps merely set a warning flag in the trace metadata,
//! since running past them is a legitimate experiment.

mod run;
mod steps;
mod trace;

pub use run::run;
pub use steps::{ogda_sequence, reflected_sequence, SequenceDiverged};
pub use trace::{SolverTrace, TraceMeta, TraceRecord};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::OperatorError;
use crate::regularizers::RegularizerError;

/// Which update rule to run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    Fbf,
    Fbfp,
    Eg,
    Egp,
    Pgda {
        #[serde(default)]
        simultaneous: bool,
    },
}

impl Method {
    /// Short identifier used in file names and reports.
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fbf => "fbf",
            Method::Fbfp => "fbfp",
            Method::Eg => "eg",
            Method::Egp => "egp",
            Method::Pgda { simultaneous: false } => "pgda",
            Method::Pgda { simultaneous: true } => "pgda_sim",
        }
    }

    /// Fresh operator evaluations consumed by `iterations` iterations.
    pub fn oracle_calls(&self, iterations: u64) -> u64 {
        match self {
            Method::Fbf | Method::Eg | Method::Pgda { .. } => 2 * iterations,
            Method::Fbfp | Method::Egp => iterations + 1,
        }
    }

    /// Whether the method recycles the previous evaluation.
    pub fn recycles(&self) -> bool {
        matches!(self, Method::Fbfp | Method::Egp)
    }
}

/// Exact or noisy oracle access.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mode {
    Deterministic,
    Stochastic {
        sigma: f64,
        /// Opt into the tighter variance constants that hold under stricter
        /// step caps.
        #[serde(default)]
        refined_regime: bool,
    },
}

impl Mode {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Mode::Stochastic { .. })
    }

    pub fn sigma(&self) -> f64 {
        match self {
            Mode::Deterministic => 0.0,
            Mode::Stochastic { sigma, .. } => *sigma,
        }
    }
}

/// A method together with its oracle mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverKind {
    pub method: Method,
    pub mode: Mode,
}

impl SolverKind {
    pub fn deterministic(method: Method) -> Self {
        SolverKind {
            method,
            mode: Mode::Deterministic,
        }
    }

    pub fn stochastic(method: Method, sigma: f64) -> Self {
        SolverKind {
            method,
            mode: Mode::Stochastic {
                sigma,
                refined_regime: false,
            },
        }
    }
}

/// Step-size sequence. `InverseSqrt` is `alpha / sqrt(k + 1)` at iteration k
/// (zero-based), the classic anytime choice for stochastic runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSchedule {
    Constant { alpha: f64 },
    InverseSqrt { alpha: f64 },
}

impl StepSchedule {
    pub fn alpha(&self, k: u64) -> f64 {
        match self {
            StepSchedule::Constant { alpha } => *alpha,
            StepSchedule::InverseSqrt { alpha } => alpha / ((k + 1) as f64).sqrt(),
        }
    }

    /// Largest step the schedule ever takes (attained at k = 0); the quantity
    /// the caps constrain.
    pub fn max_alpha(&self) -> f64 {
        match self {
            StepSchedule::Constant { alpha } | StepSchedule::InverseSqrt { alpha } => *alpha,
        }
    }
}

/// Which iterations to snapshot into the trace. The final iteration is always
/// included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RecordSchedule {
    /// About eight checkpoints per decade, nearly geometric: the rounded
    /// values of 10^(j/8).
    Geometric,
    /// Every n-th iteration.
    Every { stride: u64 },
    /// An explicit sorted list of iteration counts (1-based).
    Explicit { iters: Vec<u64> },
}

impl RecordSchedule {
    /// Materializes the sorted, deduplicated set of iteration counts in
    /// [1, total], always ending with `total`.
    pub fn checkpoints(&self, total: u64) -> Vec<u64> {
        use std::collections::BTreeSet;
        let mut set = BTreeSet::new();
        match self {
            RecordSchedule::Geometric => {
                for j in 0.. {
                    let k = 10f64.powf(j as f64 / 8.0).round() as u64;
                    if k >= total {
                        break;
                    }
                    set.insert(k.max(1));
                }
            }
            RecordSchedule::Every { stride } => {
                let s = (*stride).max(1);
                let mut k = s;
                while k < total {
                    set.insert(k);
                    k += s;
                }
            }
            RecordSchedule::Explicit { iters } => {
                set.extend(iters.iter().copied().filter(|&k| k >= 1 && k <= total));
            }
        }
        set.insert(total);
        set.into_iter().collect()
    }
}

/// Everything that determines a single solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: SolverKind,
    pub schedule: StepSchedule,
    pub iterations: u64,
    /// Seed for the noise stream (recorded but unused in deterministic mode).
    pub seed: u64,
    pub records: RecordSchedule,
}

/// Step-size cap for a method/mode pair, in units of 1/L.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepCap {
    /// Maximum admissible step, None when the method has no cap.
    pub limit: Option<f64>,
    /// Strict caps require alpha < limit; inclusive ones allow equality.
    pub strict: bool,
    /// Hard caps abort the run; soft ones only set a metadata flag.
    pub hard: bool,
}

impl StepCap {
    pub fn violated_by(&self, alpha: f64) -> bool {
        match self.limit {
            None => false,
            Some(l) => {
                if self.strict {
                    alpha >= l
                } else {
                    alpha > l
                }
            }
        }
    }
}

/// The admissible step-size region for each method/mode pair:
///
/// * exact oracles: `1/L` for `Fbf`/`Eg`, `1/(2L)` for the recycling variants
///   (both advisory),
/// * noisy oracles: `1/(sqrt(2) L)` for `Fbf` and `1/(3L)` for `Fbfp`
///   inclusive, or strictly below `1/L` and `1/(2 sqrt(2) L)` respectively in
///   the refined regime (all enforced),
/// * `Pgda`: no cap — there is nothing to protect.
pub fn step_cap(method: Method, mode: Mode, lipschitz: f64) -> StepCap {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return StepCap {
            limit: None,
            strict: false,
            hard: false,
        };
    }
    let l = lipschitz;
    match (method, mode) {
        (Method::Pgda { .. }, _) => StepCap {
            limit: None,
            strict: false,
            hard: false,
        },
        (Method::Fbf | Method::Eg, Mode::Deterministic) => StepCap {
            limit: Some(1.0 / l),
            strict: false,
            hard: false,
        },
        (Method::Fbfp | Method::Egp, Mode::Deterministic) => StepCap {
            limit: Some(1.0 / (2.0 * l)),
            strict: false,
            hard: false,
        },
        (
            Method::Fbf,
            Mode::Stochastic {
                refined_regime: false,
                ..
            },
        ) => StepCap {
            limit: Some(1.0 / (2.0_f64.sqrt() * l)),
            strict: false,
            hard: true,
        },
        (
            Method::Fbfp,
            Mode::Stochastic {
                refined_regime: false,
                ..
            },
        ) => StepCap {
            limit: Some(1.0 / (3.0 * l)),
            strict: false,
            hard: true,
        },
        (
            Method::Fbf,
            Mode::Stochastic {
                refined_regime: true,
                ..
            },
        ) => StepCap {
            limit: Some(1.0 / l),
            strict: true,
            hard: true,
        },
        (
            Method::Fbfp,
            Mode::Stochastic {
                refined_regime: true,
                ..
            },
        ) => StepCap {
            limit: Some(1.0 / (2.0 * 2.0_f64.sqrt() * l)),
            strict: true,
            hard: true,
        },
        // Remaining stochastic combinations are rejected before caps matter.
        (_, Mode::Stochastic { .. }) => StepCap {
            limit: None,
            strict: false,
            hard: false,
        },
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("step size alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("start point has dim {got}, problem has dim {expected}")]
    StartDimension { expected: usize, got: usize },
    #[error("start point contains non-finite coordinates")]
    NonFiniteStart,
    #[error("step size {alpha} violates the stochastic-mode cap {limit} for {method}")]
    StepCapViolation {
        method: &'static str,
        alpha: f64,
        limit: f64,
        strict: bool,
    },
    #[error("method {0} has no stochastic variant here; use fbf or fbfp")]
    UnsupportedStochasticMethod(&'static str),
    #[error("alternating/simultaneous descent-ascent needs a primal/dual split on the problem")]
    MissingSplit,
    #[error("iterates left the floating-point range at iteration {iteration}")]
    Diverged {
        iteration: u64,
        partial: Box<SolverTrace>,
    },
    #[error("{0}")]
    Oracle(#[from] OperatorError),
    #[error("{0}")]
    Regularizer(#[from] RegularizerError),
}
