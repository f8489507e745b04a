//! Growth function `ρ_{q,D}(z, X, μ)`.
//!
//! Two linear programs compute it from opposite sides:
//!
//! * dual: `min Σ |w_j| ‖x_j − z‖^μ` over weights exact on `Π^d_q`;
//! * primal: `max Dp(z)` over `p ∈ Π^d_q` with `|p(x_j)| ≤ ‖x_j − z‖^μ`.
//!
//! Both are solved after scaling monomials by the stencil radius, so the LP
//! data stay of order one as the stencil shrinks.

pub mod simplex;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::kernels::DiffOperator;
use crate::polyspace::PolyBasis;
use simplex::LpStatus;

const LP_TOL: f64 = 1e-11;

/// A nonnegative real or `+∞`; the latter serializes as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GrowthValue {
    Finite(f64),
    Infinite,
}

impl GrowthValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            GrowthValue::Finite(v) => Some(v),
            GrowthValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, GrowthValue::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for GrowthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthValue::Finite(v) => write!(f, "{v}"),
            GrowthValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for GrowthValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GrowthValue::Finite(v) => s.serialize_f64(*v),
            GrowthValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for GrowthValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(GrowthValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(GrowthValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthStatus {
    Finite,
    InfeasibleDual,
    UnboundedPrimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthResult {
    pub value: GrowthValue,
    pub status: GrowthStatus,
    pub mu: f64,
    pub q: u32,
    /// Optimal weights of the weighted-ℓ¹ problem.
    pub dual_weights: Option<Vec<f64>>,
    /// Coefficients of the extremal polynomial in monomials centered at `z`.
    pub primal_poly: Option<Vec<f64>>,
}

/// Scaled LP data: `V'` with `(x_j − z)^α / h^{|α|}`, `b'_i = b_i / h^{|α_i|}`,
/// costs `(‖x_j − z‖ / h)^μ`.
struct Scaled {
    v: DMatrix<f64>,
    b: DVector<f64>,
    cost: Vec<f64>,
    h: f64,
    degrees: Vec<u32>,
}

fn scaled_data(ps: &PointSet, q: u32, op: &DiffOperator, mu: f64) -> Result<Scaled> {
    if q == 0 {
        return Err(Error::InvalidArgument("growth function needs q >= 1".into()));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mu must be a nonnegative real, got {mu}"
        )));
    }
    if op.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            found: op.dim(),
        });
    }
    let radius = ps.stencil_radius();
    let h = if radius > 0.0 { radius } else { 1.0 };
    let z = ps.center();
    let basis = PolyBasis::new(q, z.clone());
    let degrees: Vec<u32> = basis.members().iter().map(|a| a.order()).collect();
    let mut v = basis.vandermonde(ps.nodes())?;
    let mut b = basis.operator_moments(op)?;
    for (i, &deg) in degrees.iter().enumerate() {
        let s = h.powi(-(deg as i32));
        v.column_mut(i).scale_mut(s);
        b[i] *= s;
    }
    let cost = ps.nodes().iter().map(|x| (x.dist(z) / h).powf(mu)).collect();
    Ok(Scaled { v, b, cost, h, degrees })
}

impl Scaled {
    fn unscale_poly(&self, y: &[f64], mu: f64) -> Vec<f64> {
        y.iter()
            .zip(&self.degrees)
            .map(|(c, &deg)| c * self.h.powf(mu) * self.h.powi(-(deg as i32)))
            .collect()
    }
}

/// Weighted-ℓ¹ formulation with `w = u − v`, `u, v ≥ 0`.
pub fn growth_dual(ps: &PointSet, q: u32, op: &DiffOperator, mu: f64) -> Result<GrowthResult> {
    let data = scaled_data(ps, q, op, mu)?;
    let n = ps.len();
    let m = data.b.len();
    let mut a = DMatrix::zeros(m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = data.v[(j, i)];
            a[(i, n + j)] = -data.v[(j, i)];
        }
    }
    let c: Vec<f64> = data.cost.iter().chain(&data.cost).copied().collect();
    let sol = simplex::solve(&a, data.b.as_slice(), &c, LP_TOL);
    match sol.status {
        LpStatus::Optimal => {
            let w: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
            let value = data.h.powf(mu) * sol.objective.max(0.0);
            Ok(GrowthResult {
                value: GrowthValue::Finite(value),
                status: GrowthStatus::Finite,
                mu,
                q,
                dual_weights: Some(w),
                primal_poly: Some(data.unscale_poly(&sol.duals, mu)),
            })
        }
        LpStatus::Infeasible => Ok(infinite(GrowthStatus::InfeasibleDual, mu, q)),
        LpStatus::Unbounded => Err(Error::InvalidArgument("weighted l1 problem cannot be unbounded".into())),
    }
}

/// Polynomial formulation: `max b'ᵀy` subject to `−c ≤ V'y ≤ c`, with
/// `y = y⁺ − y⁻` and slack variables.
pub fn growth_primal(ps: &PointSet, q: u32, op: &DiffOperator, mu: f64) -> Result<GrowthResult> {
    let data = scaled_data(ps, q, op, mu)?;
    let n = ps.len();
    let m = data.b.len();
    let cols = 2 * m + 2 * n;
    let mut a = DMatrix::zeros(2 * n, cols);
    for j in 0..n {
        for i in 0..m {
            let vji = data.v[(j, i)];
            a[(j, i)] = vji;
            a[(j, m + i)] = -vji;
            a[(n + j, i)] = -vji;
            a[(n + j, m + i)] = vji;
        }
        a[(j, 2 * m + j)] = 1.0;
        a[(n + j, 2 * m + n + j)] = 1.0;
    }
    let rhs: Vec<f64> = data.cost.iter().chain(&data.cost).copied().collect();
    let mut c = vec![0.0; cols];
    for i in 0..m {
        c[i] = -data.b[i];
        c[m + i] = data.b[i];
    }
    let sol = simplex::solve(&a, &rhs, &c, LP_TOL);
    match sol.status {
        LpStatus::Optimal => {
            let y: Vec<f64> = (0..m).map(|i| sol.x[i] - sol.x[m + i]).collect();
            let w: Vec<f64> = (0..n).map(|j| sol.duals[n + j] - sol.duals[j]).collect();
            let value = data.h.powf(mu) * (-sol.objective).max(0.0);
            Ok(GrowthResult {
                value: GrowthValue::Finite(value),
                status: GrowthStatus::Finite,
                mu,
                q,
                dual_weights: Some(w),
                primal_poly: Some(data.unscale_poly(&y, mu)),
            })
        }
        LpStatus::Unbounded => Ok(infinite(GrowthStatus::UnboundedPrimal, mu, q)),
        LpStatus::Infeasible => Err(Error::InvalidArgument("polynomial problem is always feasible".into())),
    }
}

fn infinite(status: GrowthStatus, mu: f64, q: u32) -> GrowthResult {
    GrowthResult {
        value: GrowthValue::Infinite,
        status,
        mu,
        q,
        dual_weights: None,
        primal_poly: None,
    }
}

/// `Σ |w_j| ‖x_j − z‖^μ` for the minimum-norm exact weights; an upper bound
/// for the growth function.
pub fn growth_ls_upper(ps: &PointSet, q: u32, op: &DiffOperator, mu: f64) -> Result<f64> {
    let data = scaled_data(ps, q, op, mu)?;
    let vt = data.v.transpose();
    let svd = vt.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let w = svd
        .solve(&data.b, crate::stencil::RANK_TOL * smax)
        .map_err(|e| Error::SingularSystem(e.to_string()))?;
    let resid = &vt * &w - &data.b;
    let residual = resid.norm();
    if residual > crate::stencil::CONSISTENCY_TOL * (1.0 + data.b.norm()) {
        let basis = PolyBasis::new(q, ps.center().clone());
        return Err(Error::InconsistentMoments {
            moment: basis.members()[resid.iamax()].clone(),
            residual,
        });
    }
    let total: f64 = w.iter().zip(&data.cost).map(|(a, c)| a.abs() * c).sum();
    Ok(data.h.powf(mu) * total)
}
