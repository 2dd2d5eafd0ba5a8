//! Ambient-space primitives: dense points, primal/dual splits, and compact boxes.
//!
//! Everything here is a plain immutable value. Solvers never mutate a `Point`;
//! each iteration produces fresh ones so traces and equivalence tests can keep
//! untouched history.

use thiserror::Error;

use crate::rng::RngStream;

/// Errors from constructing or combining space primitives.
#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point coordinates must be finite")]
    NonFinitePoint,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("box bound at coordinate {index} must be finite with lower <= upper")]
    InvalidBounds { index: usize },
    #[error("box must have positive diameter (lower strictly below upper somewhere)")]
    DegenerateBox,
}

/// A point of R^m. Invariant: at least one coordinate, all coordinates finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, panicking on empty or non-finite input.
    ///
    /// Use [`Point::checked`] for data that crosses an API boundary.
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Self::checked(coords.into()).expect("point coordinates must be finite and nonempty")
    }

    /// Fallible constructor for externally supplied coordinates.
    pub fn checked(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty() {
            return Err(SpaceError::ZeroDimension);
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(SpaceError::NonFinitePoint);
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Inner product. Panics on dimension mismatch.
    pub fn dot(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean distance. Panics on dimension mismatch.
    pub fn dist(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dist: dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `a*x + y` coordinatewise. Panics on dimension mismatch.
    pub fn axpy(a: f64, x: &Point, y: &Point) -> Point {
        assert_eq!(x.dim(), y.dim(), "axpy: dimension mismatch");
        Point(x.0.iter().zip(&y.0).map(|(p, q)| a * p + q).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::axpy(1.0, self, other)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::axpy(-1.0, other, self)
    }

    pub fn scale(&self, a: f64) -> Point {
        Point(self.0.iter().map(|c| a * c).collect())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point::new(v.to_vec())
    }
}

/// Block structure of a saddle problem: the first `d` coordinates are the
/// minimization variable x, the remaining `n` the maximization variable y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaddleSplit {
    d: usize,
    n: usize,
}

impl SaddleSplit {
    pub fn new(d: usize, n: usize) -> Result<Self, SpaceError> {
        if d == 0 || n == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        Ok(SaddleSplit { d, n })
    }

    pub fn primal_dim(&self) -> usize {
        self.d
    }

    pub fn dual_dim(&self) -> usize {
        self.n
    }

    /// Ambient dimension m = d + n.
    pub fn dim(&self) -> usize {
        self.d + self.n
    }

    pub fn x<'a>(&self, w: &'a Point) -> &'a [f64] {
        assert_eq!(w.dim(), self.dim(), "split: dimension mismatch");
        &w.coords()[..self.d]
    }

    pub fn y<'a>(&self, w: &'a Point) -> &'a [f64] {
        assert_eq!(w.dim(), self.dim(), "split: dimension mismatch");
        &w.coords()[self.d..]
    }

    pub fn join(&self, x: &[f64], y: &[f64]) -> Point {
        assert_eq!(x.len(), self.d, "split join: x block length");
        assert_eq!(y.len(), self.n, "split join: y block length");
        let mut v = Vec::with_capacity(self.dim());
        v.extend_from_slice(x);
        v.extend_from_slice(y);
        Point::new(v)
    }
}

/// Axis-aligned compact box [lower_1,upper_1] x ... x [lower_m,upper_m].
///
/// Invariants: finite bounds, lower_i <= upper_i for every i, and positive
/// Euclidean diameter (at least one coordinate with lower_i < upper_i).
#[derive(Clone, Debug, PartialEq)]
pub struct CompactBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl CompactBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SpaceError> {
        if lower.is_empty() {
            return Err(SpaceError::ZeroDimension);
        }
        if lower.len() != upper.len() {
            return Err(SpaceError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(SpaceError::InvalidBounds { index: i });
            }
        }
        if lower.iter().zip(&upper).all(|(lo, hi)| lo == hi) {
            return Err(SpaceError::DegenerateBox);
        }
        Ok(CompactBox { lower, upper })
    }

    /// The symmetric box [-radius, radius]^m.
    pub fn symmetric(dim: usize, radius: f64) -> Result<Self, SpaceError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(SpaceError::InvalidBounds { index: 0 });
        }
        Ok(CompactBox {
            lower: vec![-radius; dim.max(1)],
            upper: vec![radius; dim.max(1)],
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.lower[i], self.upper[i])
    }

    /// Euclidean diameter D: the distance between the two extreme corners.
    pub fn diameter(&self) -> f64 {
        self.diameter_squared().sqrt()
    }

    /// D^2 without a round trip through sqrt, for exact bound constants.
    pub fn diameter_squared(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum()
    }

    /// Inclusive membership test.
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }

    /// Coordinatewise clamp onto the box.
    pub fn project(&self, p: &Point) -> Point {
        assert_eq!(p.dim(), self.dim(), "project: dimension mismatch");
        Point::new(
            p.coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .map(|(c, (lo, hi))| c.clamp(*lo, *hi))
                .collect::<Vec<_>>(),
        )
    }

    /// All 2^m corners. Guarded because the count is exponential.
    pub fn corners(&self) -> Vec<Point> {
        let m = self.dim();
        assert!(m <= 20, "corner enumeration limited to m <= 20");
        let mut out = Vec::with_capacity(1 << m);
        for mask in 0u32..(1u32 << m) {
            let coords: Vec<f64> = (0..m)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        self.upper[i]
                    } else {
                        self.lower[i]
                    }
                })
                .collect();
            out.push(Point::new(coords));
        }
        out
    }

    /// The sub-box spanned by a coordinate range (used to restrict a box
    /// regularizer to one block of a saddle split).
    pub fn restrict(&self, range: std::ops::Range<usize>) -> Result<CompactBox, SpaceError> {
        if range.end > self.dim() || range.is_empty() {
            return Err(SpaceError::ZeroDimension);
        }
        // A sub-box of a valid box can still be degenerate; that is acceptable
        // for regularizer blocks, so bypass the diameter check deliberately.
        Ok(CompactBox {
            lower: self.lower[range.clone()].to_vec(),
            upper: self.upper[range].to_vec(),
        })
    }

    /// Uniform sample from the box.
    pub fn sample(&self, stream: &mut RngStream) -> Point {
        Point::new(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| stream.uniform(*lo, *hi))
                .collect::<Vec<_>>(),
        )
    }
}
