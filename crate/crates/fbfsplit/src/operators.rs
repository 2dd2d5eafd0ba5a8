//! Monotone operators and noisy oracles.
//!
//! The central concrete type is [`BilinearSaddleOperator`]: the gradient field
//! of a bilinear coupling `x' A y + b' x - c' y` on a primal/dual split,
//!
//! ```text
//! F(x, y) = ( A y + b,  -A' x + c )
//! ```
//!
//! which is skew-affine, hence monotone with Lipschitz constant equal to the
//! spectral norm of `A`. Solvers only see the [`Operator`] trait, so other
//! monotone fields can be plugged in; closed-form gap evaluation is what
//! specializes to the bilinear case.
//!
//! [`StochasticOracle`] wraps any operator with isotropic Gaussian noise whose
//! total variance is exactly `sigma^2` regardless of dimension, and counts how
//! many samples were drawn.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;
use crate::space::{Point, SaddleSplit};

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("{what} has length {got}, expected {expected}")]
    BadLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} contains a non-finite entry")]
    NonFinite { what: &'static str },
    #[error("spectral norm estimation needs a nonzero matrix")]
    ZeroMatrix,
    #[error("declared Lipschitz constant must be positive and finite, got {0}")]
    InvalidLipschitz(f64),
    #[error("noise level sigma must be nonnegative and finite, got {0}")]
    InvalidSigma(f64),
}

/// A vector field on R^m with a known Lipschitz constant.
pub trait Operator {
    fn dim(&self) -> usize;

    /// Lipschitz constant of the field (an upper bound is acceptable).
    fn lipschitz(&self) -> f64;

    /// Writes F(w) into `out`. Panics if either slice has the wrong length.
    fn eval_into(&self, w: &[f64], out: &mut [f64]);

    fn eval(&self, w: &Point) -> Point {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(w.coords(), &mut out);
        Point::new(out)
    }
}

/// Estimates the spectral norm of a dense row-major `rows x cols` matrix by
/// power iteration on the Gram matrix.
///
/// The start vector is drawn from a fixed internal seed, so the estimate is
/// deterministic while avoiding start vectors orthogonal to the top singular
/// direction. Iteration stops when the singular-value estimate changes by a
/// relative factor below 1e-12, or after 10^4 rounds (returning the current
/// estimate). An all-zero matrix is reported as an error rather than norm 0,
/// because every caller here divides by this value to form step-size caps.
pub fn spectral_norm_estimate(
    matrix: &[f64],
    rows: usize,
    cols: usize,
) -> Result<f64, OperatorError> {
    if matrix.len() != rows * cols {
        return Err(OperatorError::BadLength {
            what: "matrix",
            expected: rows * cols,
            got: matrix.len(),
        });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(OperatorError::NonFinite { what: "matrix" });
    }
    if matrix.iter().all(|&v| v == 0.0) {
        return Err(OperatorError::ZeroMatrix);
    }

    let mut stream = RngStream::seeded(0x9E37_79B9_7F4A_7C15);
    let mut v = vec![0.0; cols];
    stream.fill_standard_normal(&mut v);
    normalize(&mut v);

    let mut u = vec![0.0; rows];
    let mut sigma_prev = 0.0_f64;
    for _ in 0..10_000 {
        // u = M v
        for (i, ui) in u.iter_mut().enumerate() {
            let row = &matrix[i * cols..(i + 1) * cols];
            *ui = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let sigma = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sigma == 0.0 {
            // v landed in the kernel; restart from a fresh direction.
            stream.fill_standard_normal(&mut v);
            normalize(&mut v);
            continue;
        }
        // v = M' u, renormalized
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = (0..rows).map(|i| matrix[i * cols + j] * u[i]).sum();
        }
        normalize(&mut v);
        if (sigma - sigma_prev).abs() <= 1e-12 * sigma {
            return Ok(sigma);
        }
        sigma_prev = sigma;
    }
    Ok(sigma_prev)
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Gradient field of a bilinear saddle coupling; see the module docs.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearSaddleOperator {
    split: SaddleSplit,
    /// Row-major d x n coupling matrix.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    lip: f64,
}

impl BilinearSaddleOperator {
    /// Builds the operator, computing the Lipschitz constant (spectral norm of
    /// the coupling matrix) unless a value is declared. A declared value must
    /// be positive and finite; it is trusted as is, so callers can reproduce
    /// runs that used a looser analytic bound.
    pub fn new(
        split: SaddleSplit,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        declared_lipschitz: Option<f64>,
    ) -> Result<Self, OperatorError> {
        let (d, n) = (split.primal_dim(), split.dual_dim());
        if a.len() != d * n {
            return Err(OperatorError::BadLength {
                what: "A",
                expected: d * n,
                got: a.len(),
            });
        }
        if b.len() != d {
            return Err(OperatorError::BadLength {
                what: "b",
                expected: d,
                got: b.len(),
            });
        }
        if c.len() != n {
            return Err(OperatorError::BadLength {
                what: "c",
                expected: n,
                got: c.len(),
            });
        }
        for (what, v) in [("A", &a), ("b", &b), ("c", &c)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(OperatorError::NonFinite { what });
            }
        }
        let lip = match declared_lipschitz {
            Some(l) => {
                if !(l > 0.0) || !l.is_finite() {
                    return Err(OperatorError::InvalidLipschitz(l));
                }
                l
            }
            None => spectral_norm_estimate(&a, d, n)?,
        };
        Ok(Self { split, a, b, c, lip })
    }

    pub fn split(&self) -> SaddleSplit {
        self.split
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.split.dual_dim() + j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// The affine part (b, c) stacked in primal-then-dual order. For this
    /// skew-affine field, `<F(z), z> = <q, z>` for every z, which is what the
    /// closed-form gap evaluation relies on.
    pub fn affine_part(&self) -> Vec<f64> {
        let mut q = Vec::with_capacity(self.dim());
        q.extend_from_slice(&self.b);
        q.extend_from_slice(&self.c);
        q
    }

    /// Value of the smooth coupling x' A y + b' x - c' y.
    pub fn coupling_value(&self, x: &[f64], y: &[f64]) -> f64 {
        let (d, n) = (self.split.primal_dim(), self.split.dual_dim());
        assert_eq!(x.len(), d, "coupling_value: primal length");
        assert_eq!(y.len(), n, "coupling_value: dual length");
        let mut total = 0.0;
        for i in 0..d {
            let row = &self.a[i * n..(i + 1) * n];
            let ay: f64 = row.iter().zip(y).map(|(a, yj)| a * yj).sum();
            total += x[i] * ay + self.b[i] * x[i];
        }
        for j in 0..n {
            total -= self.c[j] * y[j];
        }
        total
    }
}

impl Operator for BilinearSaddleOperator {
    fn dim(&self) -> usize {
        self.split.dim()
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }

    fn eval_into(&self, w: &[f64], out: &mut [f64]) {
        let (d, n) = (self.split.primal_dim(), self.split.dual_dim());
        assert_eq!(w.len(), d + n, "operator eval: input length");
        assert_eq!(out.len(), d + n, "operator eval: output length");
        let (x, y) = (&w[..d], &w[d..]);
        // Primal block: A y + b.
        for i in 0..d {
            let row = &self.a[i * n..(i + 1) * n];
            out[i] = self.b[i] + row.iter().zip(y).map(|(a, yj)| a * yj).sum::<f64>();
        }
        // Dual block: -A' x + c.
        for j in 0..n {
            let atx: f64 = (0..d).map(|i| self.a[i * n + j] * x[i]).sum();
            out[d + j] = self.c[j] - atx;
        }
    }
}

/// Draws a dense instance with N(0, scale^2) entries in `A`, `b`, and `c`.
/// The Lipschitz constant is computed from the drawn matrix.
pub fn random_instance(
    split: SaddleSplit,
    scale: f64,
    stream: &mut RngStream,
) -> BilinearSaddleOperator {
    assert!(scale > 0.0 && scale.is_finite(), "scale must be positive");
    let (d, n) = (split.primal_dim(), split.dual_dim());
    let mut a = vec![0.0; d * n];
    let mut b = vec![0.0; d];
    let mut c = vec![0.0; n];
    stream.fill_standard_normal(&mut a);
    stream.fill_standard_normal(&mut b);
    stream.fill_standard_normal(&mut c);
    for v in a.iter_mut().chain(&mut b).chain(&mut c) {
        *v *= scale;
    }
    BilinearSaddleOperator::new(split, a, b, c, None)
        .expect("randomly drawn instance is always well formed")
}

/// Unbiased noisy oracle: each sample is F(w) plus isotropic Gaussian noise
/// with per-coordinate variance sigma^2 / m, so the expected squared noise
/// norm is exactly sigma^2 in every dimension m.
///
/// Noise variates are drawn on every call even when sigma is zero, keeping
/// the stream position a function of the call count alone; with sigma = 0 the
/// added term is exactly 0.0, so outputs coincide bitwise with the exact
/// operator.
pub struct StochasticOracle<'a, O: Operator> {
    base: &'a O,
    sigma: f64,
    coord_std: f64,
    stream: RngStream,
    samples: u64,
    noise: Vec<f64>,
}

impl<'a, O: Operator> StochasticOracle<'a, O> {
    pub fn new(base: &'a O, sigma: f64, stream: RngStream) -> Result<Self, OperatorError> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(OperatorError::InvalidSigma(sigma));
        }
        let m = base.dim();
        Ok(Self {
            base,
            sigma,
            coord_std: sigma / (m as f64).sqrt(),
            stream,
            samples: 0,
            noise: vec![0.0; m],
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Number of noisy evaluations drawn so far.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn sample_into(&mut self, w: &[f64], out: &mut [f64]) {
        self.base.eval_into(w, out);
        self.stream.fill_standard_normal(&mut self.noise);
        for (o, g) in out.iter_mut().zip(&self.noise) {
            *o += self.coord_std * g;
        }
        self.samples += 1;
    }

    pub fn sample(&mut self, w: &Point) -> Point {
        let mut out = vec![0.0; self.base.dim()];
        self.sample_into(w.coords(), &mut out);
        Point::new(out)
    }
}

/// Serialized operator description: dimensions, row-major coupling matrix,
/// affine parts, and an optional declared Lipschitz constant.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum OperatorSpecError {
    #[error("invalid block dimensions d={d}, n={n}: both must be at least 1")]
    BadDims { d: usize, n: usize },
    #[error("{0}")]
    Operator(#[from] OperatorError),
}

impl OperatorSpec {
    pub fn resolve(&self) -> Result<BilinearSaddleOperator, OperatorSpecError> {
        let split = SaddleSplit::new(self.d, self.n).map_err(|_| OperatorSpecError::BadDims {
            d: self.d,
            n: self.n,
        })?;
        Ok(BilinearSaddleOperator::new(
            split,
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.l,
        )?)
    }

    /// Serializes an operator back out. The Lipschitz constant in effect is
    /// always recorded, so resolving the result reproduces the same caps.
    pub fn from_operator(op: &BilinearSaddleOperator) -> Self {
        OperatorSpec {
            d: op.split().primal_dim(),
            n: op.split().dual_dim(),
            a: op.matrix().to_vec(),
            b: op.b().to_vec(),
            c: op.c().to_vec(),
            l: Some(op.lipschitz()),
        }
    }
}
