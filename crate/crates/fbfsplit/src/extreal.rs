//! Extended-real values.
//!
//! Regularizer values and restricted gaps live in R ∪ {+∞}; the pairing
//! function g(w,z) can also take −∞. Infinities are dedicated variants, never
//! sentinel floats, so they cannot leak into ordinary arithmetic unnoticed.
//! Comparisons are total: NegInf < Finite(_) < PosInf.

/// A value of the extended real line with totally ordered comparisons.
///
/// Invariant: `Finite` never wraps NaN or an infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a float, mapping IEEE infinities to the dedicated variants.
    /// Panics on NaN: no code path in this crate produces one legitimately.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN has no extended-real meaning");
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    /// Finite value or panic; for call sites that have already proven
    /// finiteness (for example a gap at a point inside dom r).
    pub fn expect_finite(&self, what: &str) -> f64 {
        self.finite()
            .unwrap_or_else(|| panic!("{what}: expected finite, got {self}"))
    }

    /// Collapses to f64 for display and CSV emission only.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => *v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Sum with +∞ absorbing. Panics on the indeterminate ∞ + (−∞), which no
    /// caller in this crate can produce.
    pub fn add(self, other: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => {
                panic!("indeterminate sum of opposite infinities")
            }
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => ExtReal::from_f64(a + b),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        use ExtReal::*;
        Some(match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Equal,
            (NegInf, _) | (_, PosInf) => Less,
            (_, NegInf) | (PosInf, _) => Greater,
            (Finite(a), Finite(b)) => return a.partial_cmp(b),
        })
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert!(ExtReal::Finite(1.0) < ExtReal::Finite(2.0));
        assert!(ExtReal::PosInf >= ExtReal::PosInf);
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(ExtReal::PosInf.add(ExtReal::Finite(3.0)), ExtReal::PosInf);
        assert_eq!(
            ExtReal::Finite(1.0).add(ExtReal::Finite(2.0)),
            ExtReal::Finite(3.0)
        );
        assert_eq!(ExtReal::NegInf.add(ExtReal::Finite(3.0)), ExtReal::NegInf);
    }

    #[test]
    #[should_panic]
    fn opposite_infinities_panic() {
        let _ = ExtReal::PosInf.add(ExtReal::NegInf);
    }

    #[test]
    fn display_round_trips_floats() {
        assert_eq!(format!("{}", ExtReal::Finite(0.505)), "0.505");
        assert_eq!(format!("{}", ExtReal::PosInf), "inf");
    }
}
