use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MultiIndex;

/// Linear differential operator `D = Σ a_α ∂^α` with coefficients frozen at the
/// evaluation point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffOperator {
    dim: usize,
    terms: Vec<(MultiIndex, f64)>,
}

impl DiffOperator {
    /// Builds an operator from `(α, a_α)` pairs. Repeated multi-indices are
    /// summed and zero coefficients dropped; at least one nonzero term must remain.
    pub fn new(dim: usize, terms: Vec<(MultiIndex, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidOperator("dimension must be positive".into()));
        }
        let mut merged: BTreeMap<(u32, Reverse<Vec<u32>>), f64> = BTreeMap::new();
        for (alpha, a) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.dim(),
                });
            }
            if !a.is_finite() {
                return Err(Error::InvalidOperator(format!("non-finite coefficient {a}")));
            }
            *merged
                .entry((alpha.order(), Reverse(alpha.exponents().to_vec())))
                .or_insert(0.0) += a;
        }
        let terms: Vec<_> = merged
            .into_iter()
            .filter(|(_, a)| *a != 0.0)
            .map(|((_, Reverse(e)), a)| (MultiIndex::new(e), a))
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidOperator("operator has no nonzero term".into()));
        }
        Ok(Self { dim, terms })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, vec![(MultiIndex::zero(dim), 1.0)]).expect("identity operator")
    }

    /// `∂/∂x_axis`.
    pub fn partial(dim: usize, axis: usize) -> Self {
        Self::new(dim, vec![(MultiIndex::axis(dim, axis, 1), 1.0)]).expect("partial operator")
    }

    pub fn laplacian(dim: usize) -> Self {
        let terms = (0..dim).map(|i| (MultiIndex::axis(dim, i, 2), 1.0)).collect();
        Self::new(dim, terms).expect("laplacian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero terms in graded lexicographic order.
    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    /// `k = max |α|` over nonzero terms.
    pub fn order(&self) -> u32 {
        self.terms.iter().map(|(a, _)| a.order()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let k = self.order();
        self.terms.iter().all(|(a, _)| a.order() == k)
    }

    /// Coefficient of `∂^α`, zero when absent.
    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.terms.iter().find(|(a, _)| a == alpha).map_or(0.0, |(_, c)| *c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_orders_terms() {
        let op = DiffOperator::new(
            2,
            vec![
                (MultiIndex::new(vec![0, 2]), 1.0),
                (MultiIndex::new(vec![2, 0]), 1.0),
                (MultiIndex::new(vec![0, 0]), 0.5),
                (MultiIndex::new(vec![0, 0]), -0.5),
            ],
        )
        .unwrap();
        assert_eq!(op, DiffOperator::laplacian(2));
        assert_eq!(op.order(), 2);
        assert!(op.is_homogeneous());
        assert_eq!(op.terms()[0].0, MultiIndex::new(vec![2, 0]));
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(DiffOperator::new(1, vec![(MultiIndex::new(vec![1]), 0.0)]).is_err());
        assert!(DiffOperator::new(2, vec![(MultiIndex::new(vec![1]), 1.0)]).is_err());
    }

    #[test]
    fn inhomogeneous_operator() {
        let op = DiffOperator::new(
            1,
            vec![(MultiIndex::new(vec![0]), 2.0), (MultiIndex::new(vec![1]), 1.0)],
        )
        .unwrap();
        assert_eq!(op.order(), 1);
        assert!(!op.is_homogeneous());
        assert_eq!(op.coefficient(&MultiIndex::new(vec![0])), 2.0);
    }
}
