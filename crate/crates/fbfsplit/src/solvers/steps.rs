//! Per-iteration state machines for each method, plus standalone reference
//! recursions (reflected and optimistic two-call forms) used to cross-check
//! that the recycling scheme collapses to them.
//!
//! Every vector that is about to enter a prox is checked for finiteness
//! first: the box prox would silently clamp an overflowed coordinate back
//! into range and mask divergence otherwise.

use crate::operators::{Operator, StochasticOracle};
use crate::problems::Problem;
use crate::regularizers::Regularizer;
use crate::space::Point;

use super::{Method, SolverError, StepSchedule};

use thiserror::Error;

/// Counted access to either an exact operator or a noisy oracle.
pub(crate) enum OracleHandle<'a, O: Operator> {
    Exact { op: &'a O, calls: u64 },
    Noisy(StochasticOracle<'a, O>),
}

impl<'a, O: Operator> OracleHandle<'a, O> {
    pub fn eval_into(&mut self, w: &[f64], out: &mut [f64]) {
        match self {
            OracleHandle::Exact { op, calls } => {
                op.eval_into(w, out);
                *calls += 1;
            }
            OracleHandle::Noisy(oracle) => oracle.sample_into(w, out),
        }
    }

    pub fn calls(&self) -> u64 {
        match self {
            OracleHandle::Exact { calls, .. } => *calls,
            OracleHandle::Noisy(oracle) => oracle.samples(),
        }
    }
}

/// Marker: an update produced non-finite coordinates.
pub(crate) struct StepDiverged;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Forward-backward-forward state, with or without evaluation recycling.
pub(crate) struct FbfState {
    recycle: bool,
    z: Vec<f64>,
    w: Vec<f64>,
    /// F at the forward point: fresh F(z_k) when not recycling, the stored
    /// estimate at the previous prox point when recycling.
    f_lead: Vec<f64>,
    f_w: Vec<f64>,
    pre: Vec<f64>,
}

impl FbfState {
    fn new<O: Operator>(
        recycle: bool,
        z0: &[f64],
        oracle: &mut OracleHandle<O>,
    ) -> Self {
        let m = z0.len();
        let mut state = FbfState {
            recycle,
            z: z0.to_vec(),
            w: vec![0.0; m],
            f_lead: vec![0.0; m],
            f_w: vec![0.0; m],
            pre: vec![0.0; m],
        };
        if recycle {
            // The start point doubles as the fictitious previous prox point.
            let (z, f_lead) = (&state.z, &mut state.f_lead);
            oracle.eval_into(z, f_lead);
        }
        state
    }

    fn step<O: Operator>(
        &mut self,
        alpha: f64,
        oracle: &mut OracleHandle<O>,
        reg: &Regularizer,
    ) -> Result<(), StepDiverged> {
        if !self.recycle {
            oracle.eval_into(&self.z, &mut self.f_lead);
        }
        for i in 0..self.z.len() {
            self.pre[i] = self.z[i] - alpha * self.f_lead[i];
        }
        if !all_finite(&self.pre) {
            return Err(StepDiverged);
        }
        reg.prox_raw(alpha, &self.pre, &mut self.w);
        oracle.eval_into(&self.w, &mut self.f_w);
        for i in 0..self.z.len() {
            self.z[i] = self.w[i] + alpha * (self.f_lead[i] - self.f_w[i]);
        }
        if !all_finite(&self.z) {
            return Err(StepDiverged);
        }
        if self.recycle {
            std::mem::swap(&mut self.f_lead, &mut self.f_w);
        }
        Ok(())
    }
}

/// Extragradient state (both lines prox), with or without recycling.
pub(crate) struct EgState {
    recycle: bool,
    z: Vec<f64>,
    w: Vec<f64>,
    f_lead: Vec<f64>,
    f_w: Vec<f64>,
    pre: Vec<f64>,
}

impl EgState {
    fn new<O: Operator>(
        recycle: bool,
        z0: &[f64],
        oracle: &mut OracleHandle<O>,
    ) -> Self {
        let m = z0.len();
        let mut state = EgState {
            recycle,
            z: z0.to_vec(),
            w: vec![0.0; m],
            f_lead: vec![0.0; m],
            f_w: vec![0.0; m],
            pre: vec![0.0; m],
        };
        if recycle {
            let (z, f_lead) = (&state.z, &mut state.f_lead);
            oracle.eval_into(z, f_lead);
        }
        state
    }

    fn step<O: Operator>(
        &mut self,
        alpha: f64,
        oracle: &mut OracleHandle<O>,
        reg: &Regularizer,
    ) -> Result<(), StepDiverged> {
        if !self.recycle {
            oracle.eval_into(&self.z, &mut self.f_lead);
        }
        for i in 0..self.z.len() {
            self.pre[i] = self.z[i] - alpha * self.f_lead[i];
        }
        if !all_finite(&self.pre) {
            return Err(StepDiverged);
        }
        reg.prox_raw(alpha, &self.pre, &mut self.w);
        oracle.eval_into(&self.w, &mut self.f_w);
        for i in 0..self.z.len() {
            self.pre[i] = self.z[i] - alpha * self.f_w[i];
        }
        if !all_finite(&self.pre) {
            return Err(StepDiverged);
        }
        reg.prox_raw(alpha, &self.pre, &mut self.z);
        if self.recycle {
            std::mem::swap(&mut self.f_lead, &mut self.f_w);
        }
        Ok(())
    }
}

/// Proximal gradient descent-ascent on the primal/dual blocks.
pub(crate) struct PgdaState {
    simultaneous: bool,
    d: usize,
    primal_reg: Regularizer,
    dual_reg: Regularizer,
    w: Vec<f64>,
    eval_a: Vec<f64>,
    eval_b: Vec<f64>,
    scratch: Vec<f64>,
    pre_x: Vec<f64>,
    pre_y: Vec<f64>,
    x_new: Vec<f64>,
    y_new: Vec<f64>,
}

impl PgdaState {
    fn new(
        simultaneous: bool,
        d: usize,
        primal_reg: Regularizer,
        dual_reg: Regularizer,
        z0: &[f64],
    ) -> Self {
        let m = z0.len();
        let n = m - d;
        PgdaState {
            simultaneous,
            d,
            primal_reg,
            dual_reg,
            w: z0.to_vec(),
            eval_a: vec![0.0; m],
            eval_b: vec![0.0; m],
            scratch: vec![0.0; m],
            pre_x: vec![0.0; d],
            pre_y: vec![0.0; n],
            x_new: vec![0.0; d],
            y_new: vec![0.0; n],
        }
    }

    fn step<O: Operator>(
        &mut self,
        alpha: f64,
        oracle: &mut OracleHandle<O>,
    ) -> Result<(), StepDiverged> {
        let d = self.d;
        // Primal block: forward-backward along the first field block.
        oracle.eval_into(&self.w, &mut self.eval_a);
        for i in 0..d {
            self.pre_x[i] = self.w[i] - alpha * self.eval_a[i];
        }
        if !all_finite(&self.pre_x) {
            return Err(StepDiverged);
        }
        self.primal_reg.prox_raw(alpha, &self.pre_x, &mut self.x_new);

        // Dual block: evaluated at the fresh primal when alternating, at the
        // old iterate when simultaneous. Either way the evaluation is a
        // separate oracle call by design, matching the accounting of
        // descent-ascent as two block updates.
        if self.simultaneous {
            oracle.eval_into(&self.w, &mut self.eval_b);
        } else {
            self.scratch[..d].copy_from_slice(&self.x_new);
            self.scratch[d..].copy_from_slice(&self.w[d..]);
            oracle.eval_into(&self.scratch, &mut self.eval_b);
        }
        for (j, pre) in self.pre_y.iter_mut().enumerate() {
            *pre = self.w[d + j] - alpha * self.eval_b[d + j];
        }
        if !all_finite(&self.pre_y) {
            return Err(StepDiverged);
        }
        self.dual_reg.prox_raw(alpha, &self.pre_y, &mut self.y_new);

        self.w[..d].copy_from_slice(&self.x_new);
        self.w[d..].copy_from_slice(&self.y_new);
        Ok(())
    }
}

/// Dispatch wrapper over the three state machines.
pub(crate) enum Stepper {
    Fbf(FbfState),
    Eg(EgState),
    Pgda(PgdaState),
}

impl Stepper {
    pub fn new<O: Operator>(
        method: Method,
        problem: &Problem<O>,
        z0: &Point,
        oracle: &mut OracleHandle<O>,
    ) -> Result<Self, SolverError> {
        let z = z0.coords();
        Ok(match method {
            Method::Fbf => Stepper::Fbf(FbfState::new(false, z, oracle)),
            Method::Fbfp => Stepper::Fbf(FbfState::new(true, z, oracle)),
            Method::Eg => Stepper::Eg(EgState::new(false, z, oracle)),
            Method::Egp => Stepper::Eg(EgState::new(true, z, oracle)),
            Method::Pgda { simultaneous } => {
                let split = problem.split().ok_or(SolverError::MissingSplit)?;
                let (f, h) = problem
                    .saddle_blocks()
                    .ok_or(SolverError::MissingSplit)?;
                Stepper::Pgda(PgdaState::new(
                    simultaneous,
                    split.primal_dim(),
                    f,
                    h,
                    z,
                ))
            }
        })
    }

    pub fn step<O: Operator>(
        &mut self,
        alpha: f64,
        oracle: &mut OracleHandle<O>,
        reg: &Regularizer,
    ) -> Result<(), StepDiverged> {
        match self {
            Stepper::Fbf(s) => s.step(alpha, oracle, reg),
            Stepper::Eg(s) => s.step(alpha, oracle, reg),
            Stepper::Pgda(s) => s.step(alpha, oracle),
        }
    }

    /// The point fed to ergodic averaging and gap evaluation.
    pub fn w(&self) -> &[f64] {
        match self {
            Stepper::Fbf(s) => &s.w,
            Stepper::Eg(s) => &s.w,
            Stepper::Pgda(s) => &s.w,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("reference sequence left the floating-point range at iteration {0}")]
pub struct SequenceDiverged(pub u64);

/// Reference implementation of the reflected one-call recursion
///
/// ```text
/// w_{k+1} = prox_{a_{k+1} r}( w_k - a_{k+1} F(w_k) + a_k (F(w_{k-1}) - F(w_k)) )
/// ```
///
/// started from `w_{-1} = z0` and `w_0 = prox_{a_0 r}(z0 - a_0 F(z0))`.
/// Returns the first `iterations` prox points. Written independently of the
/// recycling state machine so agreement between the two is evidence, not
/// tautology.
pub fn reflected_sequence<O: Operator>(
    problem: &Problem<O>,
    z0: &Point,
    schedule: StepSchedule,
    iterations: u64,
) -> Result<Vec<Point>, SequenceDiverged> {
    assert_eq!(z0.dim(), problem.dim(), "start point dimension");
    let op = problem.operator();
    let reg = problem.regularizer();
    let m = z0.dim();
    let mut out = Vec::with_capacity(iterations as usize);
    if iterations == 0 {
        return Ok(out);
    }

    let mut f_prev = vec![0.0; m]; // F(w_{k-1})
    let mut f_cur = vec![0.0; m]; // F(w_k)
    op.eval_into(z0.coords(), &mut f_prev);
    let a0 = schedule.alpha(0);
    let pre: Vec<f64> = z0
        .coords()
        .iter()
        .zip(&f_prev)
        .map(|(z, f)| z - a0 * f)
        .collect();
    if !all_finite(&pre) {
        return Err(SequenceDiverged(0));
    }
    let mut w = Vec::new();
    reg.prox_raw(a0, &pre, &mut w);
    out.push(Point::new(w.clone()));

    let mut alpha_prev = a0;
    let mut pre = vec![0.0; m];
    let mut w_next = Vec::new();
    for k in 1..iterations {
        let alpha = schedule.alpha(k);
        op.eval_into(&w, &mut f_cur);
        for i in 0..m {
            pre[i] = w[i] - alpha * f_cur[i] + alpha_prev * (f_prev[i] - f_cur[i]);
        }
        if !all_finite(&pre) {
            return Err(SequenceDiverged(k));
        }
        reg.prox_raw(alpha, &pre, &mut w_next);
        out.push(Point::new(w_next.clone()));
        std::mem::swap(&mut f_prev, &mut f_cur);
        std::mem::swap(&mut w, &mut w_next);
        alpha_prev = alpha;
    }
    Ok(out)
}

/// Reference implementation of the optimistic two-term recursion for the
/// unregularized inclusion:
///
/// ```text
/// w_0     = z0 - a F(z0)
/// w_{k+1} = w_k - a (2 F(w_k) - F(w_{k-1})),    w_{-1} = z0.
/// ```
///
/// Returns the first `iterations` points.
pub fn ogda_sequence<O: Operator>(
    operator: &O,
    z0: &Point,
    alpha: f64,
    iterations: u64,
) -> Result<Vec<Point>, SequenceDiverged> {
    assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive");
    assert_eq!(z0.dim(), operator.dim(), "start point dimension");
    let m = z0.dim();
    let mut out = Vec::with_capacity(iterations as usize);
    if iterations == 0 {
        return Ok(out);
    }

    let mut f_prev = vec![0.0; m];
    operator.eval_into(z0.coords(), &mut f_prev);
    let mut w: Vec<f64> = z0
        .coords()
        .iter()
        .zip(&f_prev)
        .map(|(z, f)| z - alpha * f)
        .collect();
    if !all_finite(&w) {
        return Err(SequenceDiverged(0));
    }
    out.push(Point::new(w.clone()));

    let mut f_cur = vec![0.0; m];
    for k in 1..iterations {
        operator.eval_into(&w, &mut f_cur);
        for i in 0..m {
            w[i] -= alpha * (2.0 * f_cur[i] - f_prev[i]);
        }
        if !all_finite(&w) {
            return Err(SequenceDiverged(k));
        }
        out.push(Point::new(w.clone()));
        std::mem::swap(&mut f_prev, &mut f_cur);
    }
    Ok(out)
}
