//! Run traces: periodic snapshots of the iterate, its ergodic average, and
//! the running step/oracle accounting.

use crate::space::Point;

use super::{Method, Mode, StepSchedule};

/// Snapshot taken after `iterations` completed iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    /// Number of completed iterations at snapshot time (1-based).
    pub iterations: u64,
    /// Step size used in the most recent iteration.
    pub alpha: f64,
    /// Current iterate (the prox point of the last iteration).
    pub w: Point,
    /// Step-weighted ergodic average of all iterates so far.
    pub ergodic: Point,
    /// Running sum of step sizes; denominators of ergodic weights and the
    /// companion bounds.
    pub sum_alpha: f64,
    /// Running sum of squared step sizes; enters the noise term of
    /// stochastic bounds.
    pub sum_alpha_sq: f64,
    /// Fresh oracle evaluations consumed so far.
    pub oracle_calls: u64,
}

/// Run-level metadata carried alongside the snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceMeta {
    pub method: Method,
    pub mode: Mode,
    pub schedule: StepSchedule,
    pub seed: u64,
    pub z0: Point,
    /// The step cap in effect, if any.
    pub step_cap: Option<f64>,
    /// Set when the schedule exceeds an advisory cap (deterministic mode
    /// only; in stochastic mode exceeding the cap aborts instead).
    pub step_cap_exceeded: bool,
}

/// Everything a run produced. On divergence this is still returned (inside
/// the error) with the snapshots recorded up to the failure.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
    /// Completed iterations (equals the requested count unless diverged).
    pub iterations_done: u64,
    pub total_oracle_calls: u64,
}

impl SolverTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Final ergodic average, when at least one iteration completed.
    pub fn final_ergodic(&self) -> Option<&Point> {
        self.records.last().map(|r| &r.ergodic)
    }

    /// Final iterate, when at least one iteration completed.
    pub fn final_w(&self) -> Option<&Point> {
        self.records.last().map(|r| &r.w)
    }
}

/// Running step-weighted average, updated in O(dim) per iteration.
#[derive(Clone, Debug)]
pub(crate) struct ErgodicState {
    weighted_sum: Vec<f64>,
    sum_alpha: f64,
    sum_alpha_sq: f64,
}

impl ErgodicState {
    pub fn new(dim: usize) -> Self {
        ErgodicState {
            weighted_sum: vec![0.0; dim],
            sum_alpha: 0.0,
            sum_alpha_sq: 0.0,
        }
    }

    pub fn push(&mut self, alpha: f64, w: &[f64]) {
        debug_assert_eq!(w.len(), self.weighted_sum.len());
        for (s, &wi) in self.weighted_sum.iter_mut().zip(w) {
            *s += alpha * wi;
        }
        self.sum_alpha += alpha;
        self.sum_alpha_sq += alpha * alpha;
    }

    pub fn sum_alpha(&self) -> f64 {
        self.sum_alpha
    }

    pub fn sum_alpha_sq(&self) -> f64 {
        self.sum_alpha_sq
    }

    /// Current average; callable only after at least one push.
    pub fn average(&self) -> Point {
        assert!(self.sum_alpha > 0.0, "ergodic average of an empty run");
        Point::new(
            self.weighted_sum
                .iter()
                .map(|s| s / self.sum_alpha)
                .collect::<Vec<_>>(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ergodic_average_matches_hand_arithmetic() {
        let mut e = ErgodicState::new(2);
        e.push(1.0, &[1.0, 0.0]);
        e.push(3.0, &[0.0, 2.0]);
        // Weighted average: (1*[1,0] + 3*[0,2]) / 4 = [0.25, 1.5].
        assert_eq!(e.average(), Point::from([0.25, 1.5]));
        assert_eq!(e.sum_alpha(), 4.0);
        assert_eq!(e.sum_alpha_sq(), 10.0);
    }

    #[test]
    #[should_panic(expected = "empty run")]
    fn ergodic_average_requires_a_push() {
        ErgodicState::new(1).average();
    }
}
