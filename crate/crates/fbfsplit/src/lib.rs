//! Splitting methods for regularized convex-concave saddle problems, viewed
//! as monotone inclusions `0 in F(w) + subdifferential r(w)`, together with
//! the measurement machinery (restricted merit functions, averaged-iterate
//! bounds, rate fits) needed to check the methods' worst-case guarantees on
//! desk-scale instances.
//!
//! # Layout
//!
//! * [`space`] — points, primal/dual splits, compact boxes.
//! * [`rng`] — seeded, portable random streams.
//! * [`extreal`] — extended reals for indicator-valued functions.
//! * [`regularizers`] — the proximal catalog (zero, l1, box, separable sums).
//! * [`operators`] — bilinear saddle fields, Lipschitz estimation, noisy
//!   oracles.
//! * [`problems`] — operator + regularizer bundles and stock instances.
//! * [`solvers`] — the forward-backward-forward family, extragradient,
//!   descent-ascent, and the shared run driver.
//! * [`gap`] — closed-form and lattice merit evaluation, averaging
//!   certificates.
//! * [`harness`] — experiment configs, theoretical bounds, rate fitting,
//!   seed sweeps, method comparisons, CSV/JSON reporting.
//!
//! # Quick start
//!
//! ```
//! use fbfsplit::problems::{toy_problem, toy_gap_box, toy_z0};
//! use fbfsplit::solvers::{run, Method, RecordSchedule, RunConfig, SolverKind, StepSchedule};
//! use fbfsplit::gap::{GapEvaluator, GapMethod};
//!
//! let problem = toy_problem(0.01);
//! let trace = run(
//!     &problem,
//!     &toy_z0(),
//!     &RunConfig {
//!         kind: SolverKind::deterministic(Method::Fbf),
//!         schedule: StepSchedule::Constant { alpha: 1.0 },
//!         iterations: 1000,
//!         seed: 0,
//!         records: RecordSchedule::Geometric,
//!     },
//! )
//! .unwrap();
//!
//! let eval = GapEvaluator::new(&problem, toy_gap_box(), GapMethod::ClosedForm).unwrap();
//! let last = trace.last().unwrap();
//! let merit = eval.gap(&last.ergodic).finite().unwrap();
//! // Averaged-iterate guarantee: merit <= D^2 / (2 sum of steps) = 4/K.
//! assert!(merit <= 8.0 / (2.0 * last.sum_alpha) + 1e-12);
//! ```
//!
//! The `examples/` directory walks through each capability; the `fbfsplit`
//! binary exposes the same machinery as `solve`, `sweep`, `compare`, `rate`,
//! and `toy` subcommands.

pub mod extreal;
pub mod gap;
pub mod harness;
pub mod operators;
pub mod problems;
pub mod regularizers;
pub mod rng;
pub mod solvers;
pub mod space;

pub use extreal::ExtReal;
pub use gap::{GapEvaluator, GapMethod};
pub use harness::{
    compare_methods, run_experiment, toy_experiments, Experiment, ExperimentConfig,
    ExperimentOutput, RateFit,
};
pub use operators::{BilinearSaddleOperator, Operator, StochasticOracle};
pub use problems::Problem;
pub use regularizers::Regularizer;
pub use rng::RngStream;
pub use solvers::{run, Method, Mode, RunConfig, SolverKind, SolverTrace, StepSchedule};
pub use space::{CompactBox, Point, SaddleSplit};
