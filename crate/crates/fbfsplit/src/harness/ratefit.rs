//! Log-log rate estimation: fit `log gap ~ slope * log K + intercept` over a
//! checkpoint window by ordinary least squares and report the fit quality.

use serde::Serialize;
use thiserror::Error;

/// Least-squares fit of gap decay on log-log axes over `[window.0, window.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    /// Iteration window the fit used, inclusive.
    pub window: (u64, u64),
    /// Slope of log gap vs log iterations; -1 means a 1/K decay.
    pub slope: f64,
    /// Intercept on natural-log axes.
    pub intercept: f64,
    /// Coefficient of determination in [0, 1].
    pub r_squared: f64,
    /// Checkpoints actually used (positive gap, inside the window).
    pub points_used: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum RateFitError {
    #[error("rate window [{0}, {1}] is empty or reversed")]
    BadWindow(u64, u64),
    #[error("need at least {needed} checkpoints with positive gap in the window, found {found}")]
    TooFewPoints { needed: usize, found: usize },
}

/// Minimum number of usable checkpoints for a fit to be reported.
pub const MIN_FIT_POINTS: usize = 10;

/// Fits the decay rate of `(iterations, gap)` pairs inside `window`.
///
/// Checkpoints with nonpositive gap carry no log-log information (the method
/// has hit the solution set to working precision) and are skipped; at least
/// [`MIN_FIT_POINTS`] usable checkpoints must remain.
pub fn fit_rate(points: &[(u64, f64)], window: (u64, u64)) -> Result<RateFit, RateFitError> {
    if window.0 == 0 || window.0 > window.1 {
        return Err(RateFitError::BadWindow(window.0, window.1));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(k, gap) in points {
        if k < window.0 || k > window.1 {
            continue;
        }
        if !(gap > 0.0) || !gap.is_finite() {
            continue;
        }
        xs.push((k as f64).ln());
        ys.push(gap.ln());
    }
    let m = xs.len();
    if m < MIN_FIT_POINTS {
        return Err(RateFitError::TooFewPoints {
            needed: MIN_FIT_POINTS,
            found: m,
        });
    }
    let n = m as f64;
    let mean_x: f64 = xs.iter().sum::<f64>() / n;
    let mean_y: f64 = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // Residual sum of squares; clamp to [0, 1] against float noise on
    // near-perfect fits.
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        window,
        slope,
        intercept,
        r_squared,
        points_used: m,
    })
}
