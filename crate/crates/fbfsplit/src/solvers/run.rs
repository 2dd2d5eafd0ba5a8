//! The shared run driver: validation, oracle setup, the iteration loop,
//! ergodic bookkeeping, and snapshot recording.

use crate::operators::{Operator, StochasticOracle};
use crate::problems::Problem;
use crate::rng::RngStream;
use crate::space::Point;

use super::steps::{OracleHandle, StepDiverged, Stepper};
use super::trace::ErgodicState;
use super::{
    step_cap, Method, Mode, RunConfig, SolverError, SolverTrace, TraceMeta, TraceRecord,
};

/// Runs one solver on one problem from one start point.
///
/// Validation order: iteration count, step size, start point, method/mode
/// compatibility, then step caps. Deterministic cap violations only mark
/// `step_cap_exceeded` in the metadata; stochastic ones are errors because
/// the variance analysis does not cover them. On divergence the error carries
/// everything recorded so far, so callers can still write a partial trace.
pub fn run<O: Operator>(
    problem: &Problem<O>,
    z0: &Point,
    cfg: &RunConfig,
) -> Result<SolverTrace, SolverError> {
    if cfg.iterations == 0 {
        return Err(SolverError::ZeroIterations);
    }
    let alpha_max = cfg.schedule.max_alpha();
    if !(alpha_max > 0.0) || !alpha_max.is_finite() {
        return Err(SolverError::InvalidAlpha(alpha_max));
    }
    if z0.dim() != problem.dim() {
        return Err(SolverError::StartDimension {
            expected: problem.dim(),
            got: z0.dim(),
        });
    }
    if !z0.is_finite() {
        return Err(SolverError::NonFiniteStart);
    }
    if cfg.kind.mode.is_stochastic()
        && !matches!(cfg.kind.method, Method::Fbf | Method::Fbfp)
    {
        return Err(SolverError::UnsupportedStochasticMethod(
            cfg.kind.method.name(),
        ));
    }

    let cap = step_cap(
        cfg.kind.method,
        cfg.kind.mode,
        problem.operator().lipschitz(),
    );
    let cap_exceeded = cap.violated_by(alpha_max);
    if cap_exceeded && cap.hard {
        return Err(SolverError::StepCapViolation {
            method: cfg.kind.method.name(),
            alpha: alpha_max,
            limit: cap.limit.expect("hard caps always carry a limit"),
            strict: cap.strict,
        });
    }

    let mut oracle = match cfg.kind.mode {
        Mode::Deterministic => OracleHandle::Exact {
            op: problem.operator(),
            calls: 0,
        },
        Mode::Stochastic { sigma, .. } => OracleHandle::Noisy(StochasticOracle::new(
            problem.operator(),
            sigma,
            RngStream::seeded(cfg.seed),
        )?),
    };

    let mut stepper = Stepper::new(cfg.kind.method, problem, z0, &mut oracle)?;
    let mut ergodic = ErgodicState::new(problem.dim());
    let meta = TraceMeta {
        method: cfg.kind.method,
        mode: cfg.kind.mode,
        schedule: cfg.schedule,
        seed: cfg.seed,
        z0: z0.clone(),
        step_cap: cap.limit,
        step_cap_exceeded: cap_exceeded,
    };

    let checkpoints = cfg.records.checkpoints(cfg.iterations);
    let mut next_checkpoint = 0usize;
    let mut records: Vec<TraceRecord> = Vec::with_capacity(checkpoints.len());

    for k in 0..cfg.iterations {
        let alpha = cfg.schedule.alpha(k);
        if let Err(StepDiverged) = stepper.step(alpha, &mut oracle, problem.regularizer()) {
            let partial = SolverTrace {
                meta,
                records,
                iterations_done: k,
                total_oracle_calls: oracle.calls(),
            };
            return Err(SolverError::Diverged {
                iteration: k,
                partial: Box::new(partial),
            });
        }
        ergodic.push(alpha, stepper.w());
        let done = k + 1;
        if next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == done {
            records.push(TraceRecord {
                iterations: done,
                alpha,
                w: Point::new(stepper.w().to_vec()),
                ergodic: ergodic.average(),
                sum_alpha: ergodic.sum_alpha(),
                sum_alpha_sq: ergodic.sum_alpha_sq(),
                oracle_calls: oracle.calls(),
            });
            next_checkpoint += 1;
        }
    }

    Ok(SolverTrace {
        meta,
        records,
        iterations_done: cfg.iterations,
        total_oracle_calls: oracle.calls(),
    })
}
