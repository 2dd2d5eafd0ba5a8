//! Problem bundles: an operator paired with a proximal regularizer, plus the
//! stock instances used across examples and tests.
//!
//! The scalar saddle instance `toy_problem` is the workhorse: minimize over x,
//! maximize over y in [-1, 1] the function `kappa * |x| + x * y`. Its solution
//! set is `{(0, y) : |y| <= kappa}` and its restricted merit function has the
//! closed form `(1 + kappa) * |u| + max(|v| - kappa, 0)` on the unit box, so
//! every solver claim can be checked by hand.

use crate::operators::{random_instance, BilinearSaddleOperator, Operator};
use crate::regularizers::{Regularizer, RegularizerError};
use crate::rng::RngStream;
use crate::space::{CompactBox, Point, SaddleSplit};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("operator dim {operator} and regularizer dim {regularizer} disagree")]
    DimensionMismatch { operator: usize, regularizer: usize },
    #[error("declared split covers dim {split}, operator has dim {operator}")]
    SplitMismatch { split: usize, operator: usize },
    #[error("regularizer does not separate along the declared split: {0}")]
    NotSeparable(RegularizerError),
}

/// An operator inclusion `0 in F(w) + subdifferential r(w)`, optionally
/// carrying the primal/dual split that exposes its minimax interpretation.
#[derive(Clone, Debug)]
pub struct Problem<O: Operator> {
    operator: O,
    regularizer: Regularizer,
    split: Option<SaddleSplit>,
}

impl<O: Operator> Problem<O> {
    pub fn new(
        operator: O,
        regularizer: Regularizer,
        split: Option<SaddleSplit>,
    ) -> Result<Self, ProblemError> {
        if operator.dim() != regularizer.dim() {
            return Err(ProblemError::DimensionMismatch {
                operator: operator.dim(),
                regularizer: regularizer.dim(),
            });
        }
        if let Some(s) = split {
            if s.dim() != operator.dim() {
                return Err(ProblemError::SplitMismatch {
                    split: s.dim(),
                    operator: operator.dim(),
                });
            }
            // A declared split promises blockwise structure; verify now so
            // downstream consumers (alternating methods, minimax gaps) can
            // rely on it.
            regularizer
                .split_blocks(s)
                .map_err(ProblemError::NotSeparable)?;
        }
        Ok(Self {
            operator,
            regularizer,
            split,
        })
    }

    pub fn operator(&self) -> &O {
        &self.operator
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn split(&self) -> Option<SaddleSplit> {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// The regularizer split into primal and dual blocks; requires a split.
    pub fn saddle_blocks(&self) -> Option<(Regularizer, Regularizer)> {
        let s = self.split?;
        self.regularizer.split_blocks(s).ok()
    }
}

impl Problem<BilinearSaddleOperator> {
    /// Pairs a bilinear saddle operator with a regularizer, inheriting the
    /// operator's own split.
    pub fn bilinear(
        operator: BilinearSaddleOperator,
        regularizer: Regularizer,
    ) -> Result<Self, ProblemError> {
        let split = operator.split();
        Problem::new(operator, regularizer, Some(split))
    }
}

/// Scalar saddle instance `min_x max_{|y|<=1} kappa |x| + x y`.
pub fn toy_problem(kappa: f64) -> Problem<BilinearSaddleOperator> {
    let split = SaddleSplit::new(1, 1).expect("1+1 split");
    let operator = BilinearSaddleOperator::new(
        split,
        vec![1.0],
        vec![0.0],
        vec![0.0],
        Some(1.0),
    )
    .expect("toy operator is well formed");
    let regularizer = Regularizer::separable(
        Regularizer::l1(kappa, 1).expect("kappa validated by caller"),
        Regularizer::box_indicator(CompactBox::symmetric(1, 1.0).expect("unit interval")),
    );
    Problem::bilinear(operator, regularizer).expect("toy dims agree")
}

/// Reference box for the toy instance's merit function: the unit square, with
/// squared diameter exactly 8.
pub fn toy_gap_box() -> CompactBox {
    CompactBox::symmetric(2, 1.0).expect("unit square")
}

/// Stock start point for the toy instance.
pub fn toy_z0() -> Point {
    Point::from([1.0, 1.0])
}

/// Random dense saddle instance with an l1 primal term and a box-constrained
/// dual block, plus a reference box and start point drawn inside it.
pub fn random_box_problem(
    split: SaddleSplit,
    stream: &mut RngStream,
) -> (Problem<BilinearSaddleOperator>, CompactBox, Point) {
    let operator = random_instance(split, 1.0, stream);
    let regularizer = Regularizer::separable(
        Regularizer::l1(0.1, split.primal_dim()).expect("fixed kappa"),
        Regularizer::box_indicator(
            CompactBox::symmetric(split.dual_dim(), 1.0).expect("unit box"),
        ),
    );
    let problem = Problem::bilinear(operator, regularizer).expect("dims agree");
    let gap_box = CompactBox::symmetric(split.dim(), 2.0).expect("reference box");
    let z0 = gap_box.sample(stream);
    (problem, gap_box, z0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreal::ExtReal;

    #[test]
    fn toy_problem_shape() {
        let p = toy_problem(0.01);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.operator().lipschitz(), 1.0);
        assert_eq!(p.split(), Some(SaddleSplit::new(1, 1).unwrap()));
        let (f, h) = p.saddle_blocks().unwrap();
        assert_eq!(f.value(&Point::from([0.5])), ExtReal::Finite(0.005));
        assert_eq!(h.value(&Point::from([2.0])), ExtReal::PosInf);
        assert_eq!(toy_gap_box().diameter_squared(), 8.0);
        assert_eq!(toy_z0(), Point::from([1.0, 1.0]));
    }

    #[test]
    fn mismatched_dims_rejected() {
        let op = toy_problem(0.01).operator().clone();
        let err = Problem::new(op, Regularizer::zero(3), None).unwrap_err();
        assert_eq!(
            err,
            ProblemError::DimensionMismatch {
                operator: 2,
                regularizer: 3
            }
        );
    }

    #[test]
    fn random_problem_start_is_feasible_for_gap_box() {
        let mut s = RngStream::seeded(1);
        let (p, gap_box, z0) = random_box_problem(SaddleSplit::new(2, 3).unwrap(), &mut s);
        assert_eq!(p.dim(), 5);
        assert!(gap_box.contains(&z0));
    }

    #[test]
    fn split_with_unsplittable_regularizer_rejected() {
        let op = toy_problem(0.01).operator().clone();
        // Separable with blocks (2, 0)-style mismatch: f spans both coords.
        let reg = Regularizer::separable(Regularizer::zero(2), Regularizer::zero(1));
        let err = Problem::new(op, reg, Some(SaddleSplit::new(1, 1).unwrap()));
        assert!(matches!(err, Err(ProblemError::DimensionMismatch { .. })));
        // Operator and regularizer agree but the split covers a different dim.
        let op = toy_problem(0.01).operator().clone();
        let err = Problem::new(op, Regularizer::zero(2), Some(SaddleSplit::new(2, 1).unwrap()));
        assert!(matches!(err, Err(ProblemError::SplitMismatch { .. })));
        // Dim and split agree, but the separable blocks sit crosswise.
        let split = SaddleSplit::new(1, 2).unwrap();
        let op3 = BilinearSaddleOperator::new(
            split,
            vec![1.0, 0.0],
            vec![0.0],
            vec![0.0, 0.0],
            Some(1.0),
        )
        .unwrap();
        let reg = Regularizer::separable(Regularizer::zero(2), Regularizer::zero(1));
        let err = Problem::new(op3, reg, Some(split));
        assert!(matches!(err, Err(ProblemError::NotSeparable(_))));
    }
}
