//! Restricted merit (gap) functions over a compact reference box.
//!
//! For a point w, the canonical merit is
//!
//! ```text
//! G_B(w) = sup_{z in B} [ <F(z), w - z> + r(w) - r(z) ]
//! ```
//!
//! which is nonnegative whenever w lies in B and zero exactly at solutions
//! restricted to B. For a saddle problem there is a second reading, the worst
//! primal-dual payoff difference over B; for bilinear couplings with
//! separable regularizers the two coincide, and this module implements both
//! as *independent* closed forms so their agreement can be tested rather than
//! assumed.
//!
//! Closed-form evaluation exploits two facts: the field is skew-affine, so
//! `<F(z), z> = <q, z>` collapses the integrand to a function linear in z;
//! and the regularizer is coordinatewise separable, so the supremum splits
//! into one-dimensional maxima of concave piecewise-linear functions, each
//! attained on a known finite breakpoint set (box endpoints, the kink at the
//! origin, clipped domain endpoints). A brute-force lattice maximizer is kept
//! alongside as the oracle the closed forms are checked against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extreal::ExtReal;
use crate::operators::{BilinearSaddleOperator, Operator};
use crate::problems::Problem;
use crate::regularizers::CoordPiece;
use crate::space::{CompactBox, Point};

/// Largest breakpoint-lattice size the averaging certificate will enumerate.
const MAX_LATTICE: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum GapError {
    #[error("reference box has dim {got}, problem has dim {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point has dim {got}, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("the saddle reading of the gap needs a primal/dual split on the problem")]
    NeedsSplit,
    #[error("coordinate {coord}: reference box and regularizer domain do not intersect")]
    EmptyFeasible { coord: usize },
    #[error("grid evaluation is limited to dim <= 3, got {0}")]
    GridDimension(usize),
    #[error("grid needs at least 2 points per axis, got {0}")]
    GridResolution(usize),
    #[error("breakpoint lattice has {size} points, exceeding the {MAX_LATTICE} cap")]
    LatticeTooLarge { size: usize },
    #[error("averaging certificate needs at least one (step, point) pair")]
    EmptySequence,
    #[error("step weights must be positive and finite")]
    BadWeight,
}

/// Value of a one-dimensional regularizer piece at a point of its domain.
fn piece_value(piece: CoordPiece, t: f64) -> f64 {
    match piece {
        CoordPiece::Free | CoordPiece::Interval(..) => 0.0,
        CoordPiece::Abs(kappa) => kappa * t.abs(),
    }
}

/// Candidate maximizers of `slope * t - piece(t)` over `[lo, hi]`, which is
/// concave piecewise-linear: the (clipped) interval endpoints plus the kink
/// at the origin for absolute-value pieces.
fn axis_breakpoints(
    piece: CoordPiece,
    lo: f64,
    hi: f64,
    coord: usize,
) -> Result<Vec<f64>, GapError> {
    let mut pts = match piece {
        CoordPiece::Free => vec![lo, hi],
        CoordPiece::Abs(_) => {
            let mut v = vec![lo, hi];
            if lo < 0.0 && 0.0 < hi {
                v.push(0.0);
            }
            v
        }
        CoordPiece::Interval(a, b) => {
            let flo = lo.max(a);
            let fhi = hi.min(b);
            if flo > fhi {
                return Err(GapError::EmptyFeasible { coord });
            }
            vec![flo, fhi]
        }
    };
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

/// `max over the axis breakpoints of slope * t - piece(t)`.
fn axis_sup(piece: CoordPiece, lo: f64, hi: f64, slope: f64, coord: usize) -> Result<f64, GapError> {
    let pts = axis_breakpoints(piece, lo, hi, coord)?;
    Ok(pts
        .iter()
        .map(|&t| slope * t - piece_value(piece, t))
        .fold(f64::NEG_INFINITY, f64::max))
}

fn check_dims(
    problem: &Problem<BilinearSaddleOperator>,
    gap_box: &CompactBox,
    w: &Point,
) -> Result<(), GapError> {
    if gap_box.dim() != problem.dim() {
        return Err(GapError::DimensionMismatch {
            expected: problem.dim(),
            got: gap_box.dim(),
        });
    }
    if w.dim() != problem.dim() {
        return Err(GapError::PointDimension {
            expected: problem.dim(),
            got: w.dim(),
        });
    }
    Ok(())
}

/// The integrand `g(w, z) = <F(z), w - z> + r(w) - r(z)`.
///
/// Extended-real conventions: an infeasible w gives +inf (the merit of an
/// infeasible point is infinite, whatever z is); a feasible w against an
/// infeasible z gives -inf (such z contribute nothing to a supremum).
pub fn g_value(
    problem: &Problem<BilinearSaddleOperator>,
    w: &Point,
    z: &Point,
) -> ExtReal {
    assert_eq!(w.dim(), problem.dim(), "g_value: w dimension");
    assert_eq!(z.dim(), problem.dim(), "g_value: z dimension");
    let r = problem.regularizer();
    match (r.value(w), r.value(z)) {
        (ExtReal::PosInf, _) => ExtReal::PosInf,
        (ExtReal::Finite(rw), ExtReal::Finite(rz)) => {
            let fz = problem.operator().eval(z);
            let inner = fz.dot(&w.sub(z));
            ExtReal::Finite(inner + rw - rz)
        }
        (ExtReal::Finite(_), ExtReal::PosInf) => ExtReal::NegInf,
        (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => {
            unreachable!("regularizer values are never -inf")
        }
    }
}

/// Closed-form merit in its operator reading: using the skew identity
/// `<F(z), w - z> = <q, w> - <F(w), z>`, the supremum over z separates into
/// per-coordinate maxima with slopes `-F(w)_i`.
pub fn vi_gap(
    problem: &Problem<BilinearSaddleOperator>,
    gap_box: &CompactBox,
    w: &Point,
) -> Result<ExtReal, GapError> {
    check_dims(problem, gap_box, w)?;
    let r = problem.regularizer();
    let rw = match r.value(w) {
        ExtReal::Finite(v) => v,
        _ => return Ok(ExtReal::PosInf),
    };
    let op = problem.operator();
    let fw = op.eval(w);
    let q = op.affine_part();
    let mut total = rw;
    for (qi, wi) in q.iter().zip(w.coords()) {
        total += qi * wi;
    }
    for i in 0..problem.dim() {
        let (lo, hi) = gap_box.interval(i);
        total += axis_sup(r.coord_piece(i), lo, hi, -fw[i], i)?;
    }
    Ok(ExtReal::Finite(total))
}

/// Closed-form merit in its saddle reading: the worst payoff difference
///
/// ```text
/// sup_{(x,y) in B} [ psi(u, y) - psi(x, v) ]
/// ```
///
/// for the saddle function `psi(x, y) = f(x) + x'Ay + b'x - c'y - h(y)`,
/// assembled coordinatewise from the two partial maximizations. Independent
/// of [`vi_gap`] by construction; the two agree for this problem class.
pub fn minimax_gap(
    problem: &Problem<BilinearSaddleOperator>,
    gap_box: &CompactBox,
    w: &Point,
) -> Result<ExtReal, GapError> {
    check_dims(problem, gap_box, w)?;
    let split = problem.split().ok_or(GapError::NeedsSplit)?;
    let (f, h) = problem.saddle_blocks().ok_or(GapError::NeedsSplit)?;
    let (d, n) = (split.primal_dim(), split.dual_dim());
    let op = problem.operator();
    let (u, v) = (&w.coords()[..d], &w.coords()[d..]);

    let fu = match f.value(&Point::new(u.to_vec())) {
        ExtReal::Finite(x) => x,
        _ => return Ok(ExtReal::PosInf),
    };
    let hv = match h.value(&Point::new(v.to_vec())) {
        ExtReal::Finite(x) => x,
        _ => return Ok(ExtReal::PosInf),
    };

    let mut total = fu + hv;
    for (bi, ui) in op.b().iter().zip(u) {
        total += bi * ui;
    }
    for (cj, vj) in op.c().iter().zip(v) {
        total += cj * vj;
    }
    // Best dual response to u: slopes (A'u - c)_j against the h pieces.
    for j in 0..n {
        let atu: f64 = (0..d).map(|i| op.entry(i, j) * u[i]).sum();
        let (lo, hi) = gap_box.interval(d + j);
        total += axis_sup(h.coord_piece(j), lo, hi, atu - op.c()[j], d + j)?;
    }
    // Best primal response to v: slopes -(Av + b)_i against the f pieces.
    for i in 0..d {
        let av: f64 = (0..n).map(|j| op.entry(i, j) * v[j]).sum();
        let (lo, hi) = gap_box.interval(i);
        total += axis_sup(f.coord_piece(i), lo, hi, -(av + op.b()[i]), i)?;
    }
    Ok(ExtReal::Finite(total))
}

/// Brute-force merit estimate: the raw maximum of the integrand over a
/// uniform lattice with `points_per_axis` points per coordinate (axis value
/// `lo + (i/(p-1)) (hi - lo)`, so box corners are always included and an odd
/// count includes 0 on symmetric axes). Deliberately *not* clamped from
/// below: on a coarse lattice the estimate can be negative even at a
/// solution, and seeing that is the point of having the raw oracle.
/// Restricted to dim <= 3.
pub fn grid_gap(
    problem: &Problem<BilinearSaddleOperator>,
    gap_box: &CompactBox,
    w: &Point,
    points_per_axis: usize,
) -> Result<ExtReal, GapError> {
    check_dims(problem, gap_box, w)?;
    let m = problem.dim();
    if m > 3 {
        return Err(GapError::GridDimension(m));
    }
    if points_per_axis < 2 {
        return Err(GapError::GridResolution(points_per_axis));
    }
    let p = points_per_axis;
    let axis_value = |i: usize, idx: usize| -> f64 {
        let (lo, hi) = gap_box.interval(i);
        lo + (idx as f64 / (p - 1) as f64) * (hi - lo)
    };
    let mut best = ExtReal::NegInf;
    let mut idx = vec![0usize; m];
    let mut z = vec![0.0; m];
    loop {
        for i in 0..m {
            z[i] = axis_value(i, idx[i]);
        }
        best = best.max(g_value(problem, w, &Point::new(z.clone())));
        // Odometer increment over the m-fold product.
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < p {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == m {
                return Ok(best);
            }
        }
    }
}

/// How to evaluate the merit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GapMethod {
    /// Exact breakpoint maximization (the default).
    ClosedForm,
    /// Lattice search; see [`grid_gap`]. The evaluator additionally forces
    /// z = w into the candidate set so feasible points never report a
    /// negative merit due to lattice coarseness alone.
    Grid { points_per_axis: usize },
}

impl Default for GapMethod {
    fn default() -> Self {
        GapMethod::ClosedForm
    }
}

/// Which reading of the merit the evaluator reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// Worst payoff difference over the box (problems with a declared split).
    Minimax,
    /// Operator-theoretic merit (problems without a split).
    Vi,
}

/// Validated merit evaluator bound to one problem and one reference box.
pub struct GapEvaluator<'a> {
    problem: &'a Problem<BilinearSaddleOperator>,
    gap_box: CompactBox,
    kind: GapKind,
    method: GapMethod,
}

impl<'a> GapEvaluator<'a> {
    /// Binds an evaluator, choosing the saddle reading when the problem
    /// declares a split and the operator reading otherwise. Fails fast on
    /// dimension mismatches, empty feasible axes, or unusable grid settings.
    pub fn new(
        problem: &'a Problem<BilinearSaddleOperator>,
        gap_box: CompactBox,
        method: GapMethod,
    ) -> Result<Self, GapError> {
        if gap_box.dim() != problem.dim() {
            return Err(GapError::DimensionMismatch {
                expected: problem.dim(),
                got: gap_box.dim(),
            });
        }
        for i in 0..problem.dim() {
            let (lo, hi) = gap_box.interval(i);
            axis_breakpoints(problem.regularizer().coord_piece(i), lo, hi, i)?;
        }
        if let GapMethod::Grid { points_per_axis } = method {
            if problem.dim() > 3 {
                return Err(GapError::GridDimension(problem.dim()));
            }
            if points_per_axis < 2 {
                return Err(GapError::GridResolution(points_per_axis));
            }
        }
        let kind = if problem.split().is_some() {
            GapKind::Minimax
        } else {
            GapKind::Vi
        };
        Ok(GapEvaluator {
            problem,
            gap_box,
            kind,
            method,
        })
    }

    pub fn kind(&self) -> GapKind {
        self.kind
    }

    pub fn gap_box(&self) -> &CompactBox {
        &self.gap_box
    }

    /// Merit of w. Infallible after construction: every error condition is
    /// ruled out up front.
    pub fn gap(&self, w: &Point) -> ExtReal {
        match self.method {
            GapMethod::ClosedForm => {
                let res = match self.kind {
                    GapKind::Minimax => minimax_gap(self.problem, &self.gap_box, w),
                    GapKind::Vi => vi_gap(self.problem, &self.gap_box, w),
                };
                res.expect("validated at construction")
            }
            GapMethod::Grid { points_per_axis } => {
                let lattice = grid_gap(self.problem, &self.gap_box, w, points_per_axis)
                    .expect("validated at construction");
                lattice.max(g_value(self.problem, w, w))
            }
        }
    }
}

/// Outcome of the step-weighted averaging certificate; see
/// [`averaging_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct AveragingCertificate {
    /// Number of lattice candidates enumerated.
    pub candidates: usize,
    /// min over candidates z of  avg_k g(w_k, z) - g(wbar, z); nonnegative
    /// (up to tolerance) by convexity of r, for any sequence whatsoever.
    pub min_pointwise_margin: f64,
    /// max over candidates of the weighted average avg_k g(w_k, z).
    pub lattice_average_max: f64,
    /// Closed-form merit of the weighted average point.
    pub gap_at_average: f64,
    /// Same maximum taken over box corners only. Corners miss the interior
    /// breakpoints (kinks, clipped domain endpoints), so this value can fall
    /// strictly below `gap_at_average`; it is reported for comparison, not
    /// relied on.
    pub corner_average_max: f64,
    /// Whether the pointwise margin stayed >= -tolerance everywhere.
    pub pointwise_dominates: bool,
    /// Whether `lattice_average_max >= gap_at_average - tolerance`, the
    /// inequality that makes the average's merit certifiable from per-iterate
    /// quantities.
    pub average_is_certified: bool,
}

/// Verifies, on the breakpoint lattice, that step-weighted averages of the
/// integrand dominate the integrand at the averaged point,
///
/// ```text
/// (sum_k a_k g(w_k, z)) / (sum_k a_k)  >=  g(wbar_K, z)    for each z,
/// ```
///
/// and that the lattice maximum of the left side dominates the closed-form
/// merit of the average. The lattice is the product of the per-axis
/// breakpoint sets — exactly the candidates on which the closed-form supremum
/// is attained — so the second inequality follows from the first. Box corners
/// alone are *not* sufficient for the second inequality (they can miss every
/// maximizer); the returned report carries the corner value so the difference
/// stays visible.
pub fn averaging_certificate(
    problem: &Problem<BilinearSaddleOperator>,
    gap_box: &CompactBox,
    steps: &[(f64, Point)],
    tolerance: f64,
) -> Result<AveragingCertificate, GapError> {
    if gap_box.dim() != problem.dim() {
        return Err(GapError::DimensionMismatch {
            expected: problem.dim(),
            got: gap_box.dim(),
        });
    }
    if steps.is_empty() {
        return Err(GapError::EmptySequence);
    }
    for (a, w) in steps {
        if !(*a > 0.0) || !a.is_finite() {
            return Err(GapError::BadWeight);
        }
        if w.dim() != problem.dim() {
            return Err(GapError::PointDimension {
                expected: problem.dim(),
                got: w.dim(),
            });
        }
    }
    let m = problem.dim();
    let r = problem.regularizer();

    // Per-axis breakpoints and the lattice size guard.
    let mut axes = Vec::with_capacity(m);
    let mut size = 1usize;
    for i in 0..m {
        let (lo, hi) = gap_box.interval(i);
        let pts = axis_breakpoints(r.coord_piece(i), lo, hi, i)?;
        size = size.saturating_mul(pts.len());
        axes.push(pts);
    }
    if size > MAX_LATTICE {
        return Err(GapError::LatticeTooLarge { size });
    }

    // Weighted average point.
    let sum_alpha: f64 = steps.iter().map(|(a, _)| a).sum();
    let mut avg = vec![0.0; m];
    for (a, w) in steps {
        for (s, &wi) in avg.iter_mut().zip(w.coords()) {
            *s += a * wi;
        }
    }
    for s in avg.iter_mut() {
        *s /= sum_alpha;
    }
    let wbar = Point::new(avg);

    let weighted_avg_g = |z: &Point| -> f64 {
        let mut acc = 0.0;
        for (a, w) in steps {
            acc += a * g_value(problem, w, z).to_f64();
        }
        acc / sum_alpha
    };

    // Enumerate the lattice with an odometer over the axis lists.
    let mut idx = vec![0usize; m];
    let mut candidates = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut lattice_max = f64::NEG_INFINITY;
    'outer: loop {
        let z = Point::new(
            idx.iter()
                .enumerate()
                .map(|(i, &j)| axes[i][j])
                .collect::<Vec<_>>(),
        );
        let avg_g = weighted_avg_g(&z);
        let at_avg = g_value(problem, &wbar, &z).to_f64();
        min_margin = min_margin.min(avg_g - at_avg);
        lattice_max = lattice_max.max(avg_g);
        candidates += 1;
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < axes[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == m {
                break 'outer;
            }
        }
    }

    let corner_max = gap_box
        .corners()
        .iter()
        .map(|z| weighted_avg_g(z))
        .fold(f64::NEG_INFINITY, f64::max);

    let gap_at_average = vi_gap(problem, gap_box, &wbar)?.to_f64();

    Ok(AveragingCertificate {
        candidates,
        min_pointwise_margin: min_margin,
        lattice_average_max: lattice_max,
        gap_at_average,
        corner_average_max: corner_max,
        pointwise_dominates: min_margin >= -tolerance,
        average_is_certified: lattice_max >= gap_at_average - tolerance,
    })
}
