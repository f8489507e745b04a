//! Monomial bases for `Π^d_q`, the polynomials of total degree at most `q − 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_multi_indices, MultiIndex, Point};
use crate::kernels::DiffOperator;

/// `dim Π^d_q = C(d + q − 1, d)`, and `0` for `q = 0`.
pub fn poly_dim(d: usize, q: u32) -> usize {
    if q == 0 {
        return 0;
    }
    let n = d as u64 + u64::from(q) - 1;
    let k = d as u64;
    ((1..=k).fold(1u64, |acc, i| acc * (n - k + i) / i)) as usize
}

/// Monomials `(x − c)^α`, `|α| ≤ q − 1`, in graded lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBasis {
    q: u32,
    center: Point,
    members: Vec<MultiIndex>,
}

impl PolyBasis {
    pub fn new(q: u32, center: Point) -> Self {
        let members = if q == 0 {
            Vec::new()
        } else {
            enumerate_multi_indices(center.dim(), q - 1)
        };
        Self { q, center, members }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Values of all basis monomials at `x`.
    pub fn eval(&self, x: &Point) -> Vec<f64> {
        let shifted = x.sub(&self.center);
        self.members.iter().map(|a| a.monomial(&shifted)).collect()
    }

    /// `N × M` matrix with entry `(j, i) = p_i(x_j)`.
    pub fn vandermonde(&self, nodes: &[Point]) -> Result<DMatrix<f64>> {
        if let Some(bad) = nodes.iter().find(|x| x.dim() != self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: bad.dim(),
            });
        }
        let mut v = DMatrix::zeros(nodes.len(), self.len());
        for (j, x) in nodes.iter().enumerate() {
            for (i, val) in self.eval(x).into_iter().enumerate() {
                v[(j, i)] = val;
            }
        }
        Ok(v)
    }

    /// `D p_i(z)` for every basis member, at an arbitrary point `z`.
    pub fn operator_moments_at(&self, op: &DiffOperator, z: &Point) -> Result<DVector<f64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        let shifted = z.sub(&self.center);
        Ok(DVector::from_iterator(
            self.len(),
            self.members.iter().map(|gamma| {
                op.terms()
                    .iter()
                    .map(|(alpha, a)| a * monomial_derivative(gamma, alpha, &shifted))
                    .sum::<f64>()
            }),
        ))
    }

    /// `D p_i(c)` at the basis center: `a_{α_i} α_i!` for members present in `D`.
    pub fn operator_moments(&self, op: &DiffOperator) -> Result<DVector<f64>> {
        self.operator_moments_at(op, &self.center)
    }
}

/// `∂^α v^γ` evaluated at `v`.
pub(crate) fn monomial_derivative(gamma: &MultiIndex, alpha: &MultiIndex, v: &[f64]) -> f64 {
    let mut acc = 1.0;
    for ((&g, &a), &x) in gamma.exponents().iter().zip(alpha.exponents()).zip(v) {
        if a > g {
            return 0.0;
        }
        let falling: f64 = ((g - a + 1)..=g).map(f64::from).product();
        acc *= falling * x.powi((g - a) as i32);
    }
    acc
}

/// A polynomial expressed in a [`PolyBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    basis: PolyBasis,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(basis: PolyBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: PolyBasis) -> Self {
        let n = basis.len();
        Self {
            basis,
            coeffs: vec![0.0; n],
        }
    }

    pub fn basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.basis.eval(x).iter().zip(&self.coeffs).map(|(p, c)| p * c).sum()
    }

    /// `D p(z)`.
    pub fn apply_operator(&self, op: &DiffOperator, z: &Point) -> Result<f64> {
        let m = self.basis.operator_moments_at(op, z)?;
        Ok(m.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum())
    }
}
