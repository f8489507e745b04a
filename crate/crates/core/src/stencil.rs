//! Assembly and solution of the saddle-point system for stencil weights.
//!
//! The weights `w*` minimize `wᵀKw − 2 wᵀ(D′K(z,·))` subject to the moment
//! equations `Vᵀw = (Dp_i(z))_i`. They are unique whenever the moment system is
//! consistent, even when `V` is rank deficient.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MultiIndex, PointSet};
use crate::kernels::{DiffOperator, KernelSpec};
use crate::linalg::{ColPivQr, SymmetricIndefinite};
use crate::polyspace::PolyBasis;

/// Relative threshold on `|R_ii| / |R_00|` for numerical rank.
pub const RANK_TOL: f64 = 1e-10;
/// Moment systems with residual above `CONSISTENCY_TOL · (1 + ‖b‖)` are inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-13;
const MAX_KKT_CONDITION: f64 = 1e12;
const MIN_REDUCED_PIVOT: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct StencilProblem {
    kernel: KernelSpec,
    op: DiffOperator,
    ps: PointSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub consistent: bool,
    /// Distance from the (column-equilibrated) moment vector to `range(Vᵀ)`.
    pub residual: f64,
    pub rank: usize,
    /// Basis monomial whose moment equation carries the largest residual.
    pub violated: Option<MultiIndex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverRoute {
    SymmetricIndefinite,
    Nullspace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rank: usize,
    pub basis_size: usize,
    pub consistency_residual: f64,
    pub condition_estimate: f64,
    pub route: SolverRoute,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StencilResult {
    pub weights: Vec<f64>,
    /// Polynomial coefficients in the basis used for the solve. Not unique when
    /// `V` is rank deficient; this is the minimum-norm choice.
    pub aux: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl StencilProblem {
    pub fn new(kernel: KernelSpec, op: DiffOperator, ps: PointSet) -> Result<Self> {
        if op.dim() != ps.dim() {
            return Err(Error::DimensionMismatch {
                expected: ps.dim(),
                found: op.dim(),
            });
        }
        kernel.check_dimension(ps.dim())?;
        kernel.check_operator_order(op.order())?;
        Ok(Self { kernel, op, ps })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn operator(&self) -> &DiffOperator {
        &self.op
    }

    pub fn points(&self) -> &PointSet {
        &self.ps
    }

    pub fn s(&self) -> u32 {
        self.kernel.cpd_order()
    }

    /// Monomials of degree `< s` centered at `z`.
    pub fn basis(&self) -> PolyBasis {
        PolyBasis::new(self.s(), self.ps.center().clone())
    }

    /// Same problem on the dilated set `z + h(X − z)`.
    pub fn scaled(&self, h: f64) -> Result<Self> {
        Ok(Self {
            kernel: self.kernel.clone(),
            op: self.op.clone(),
            ps: self.ps.scale(h)?,
        })
    }

    /// `[K(x_i, x_j)]`.
    pub fn kernel_matrix(&self) -> DMatrix<f64> {
        let nodes = self.ps.nodes();
        let n = nodes.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.kernel.eval(&nodes[i], &nodes[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    /// `(D′K(z, x_j))_j`.
    pub fn kernel_rhs(&self) -> Result<DVector<f64>> {
        let z = self.ps.center();
        let vals = self
            .ps
            .nodes()
            .iter()
            .map(|x| self.kernel.operator_apply_kernel(&self.op, z, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    pub fn check_consistency(&self) -> Result<Consistency> {
        let basis = self.basis();
        let (v, b) = self.equilibrated(&basis)?;
        Ok(consistency(&v, &b, &basis))
    }

    pub fn compute_weights(&self) -> Result<StencilResult> {
        self.compute_weights_with_basis(&self.basis())
    }

    /// Solves with an arbitrary basis of `Π^d_s`, e.g. one centered away from `z`.
    pub fn compute_weights_with_basis(&self, basis: &PolyBasis) -> Result<StencilResult> {
        if basis.q() != self.s() || basis.dim() != self.ps.dim() {
            return Err(Error::InvalidArgument(format!(
                "basis of order {} in dimension {} does not match s = {}",
                basis.q(),
                basis.dim(),
                self.s()
            )));
        }
        if let Some(&(i, j)) = self.ps.duplicate_nodes().first() {
            return Err(Error::SingularSystem(format!("nodes {i} and {j} coincide")));
        }
        let (v, b) = self.equilibrated(basis)?;
        let status = consistency(&v, &b, basis);
        if !status.consistent {
            return Err(Error::InconsistentMoments {
                moment: status
                    .violated
                    .clone()
                    .unwrap_or_else(|| MultiIndex::zero(self.ps.dim())),
                residual: status.residual,
            });
        }
        let k = self.kernel_matrix();
        let f = self.kernel_rhs()?;
        let scale = column_scales(&basis.vandermonde(self.ps.nodes())?);

        let attempt = if status.rank == basis.len() {
            solve_kkt(&k, &v, &f, &b)
        } else {
            None
        };
        let (w, v_eq, cond, route) = match attempt {
            Some((w, v_eq, cond)) => (w, v_eq, cond, SolverRoute::SymmetricIndefinite),
            None => {
                let (w, v_eq, cond) = solve_nullspace(&k, &v, &f, &b, status.rank)?;
                (w, v_eq, cond, SolverRoute::Nullspace)
            }
        };
        let aux: Vec<f64> = v_eq.iter().zip(&scale).map(|(a, s)| a * s).collect();
        Ok(StencilResult {
            weights: w.iter().copied().collect(),
            aux,
            diagnostics: Diagnostics {
                rank: status.rank,
                basis_size: basis.len(),
                consistency_residual: status.residual,
                condition_estimate: cond,
                route,
            },
        })
    }

    /// Orthonormal basis of `ker Vᵀ`, the directions that keep polynomial
    /// exactness intact.
    pub fn moment_nullspace(&self) -> Result<DMatrix<f64>> {
        let basis = self.basis();
        let (v, _) = self.equilibrated(&basis)?;
        Ok(orthonormal_complement(&v))
    }

    /// Residual `‖Vᵀw − b‖` in equilibrated form, and the matching tolerance.
    pub fn exactness_residual(&self, w: &[f64]) -> Result<(f64, f64)> {
        if w.len() != self.ps.len() {
            return Err(Error::LengthMismatch {
                left: w.len(),
                right: self.ps.len(),
            });
        }
        let (v, b) = self.equilibrated(&self.basis())?;
        let w = DVector::from_column_slice(w);
        let resid = (v.transpose() * &w - &b).norm();
        let tol = CONSISTENCY_TOL * (1.0 + b.norm() + w.lp_norm(1));
        Ok((resid, tol))
    }

    /// Vandermonde matrix with columns scaled to unit max-norm, and the moment
    /// vector scaled to match.
    pub(crate) fn equilibrated(&self, basis: &PolyBasis) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let mut v = basis.vandermonde(self.ps.nodes())?;
        let mut b = basis.operator_moments_at(&self.op, self.ps.center())?;
        for (i, s) in column_scales(&v).into_iter().enumerate() {
            v.column_mut(i).scale_mut(s);
            b[i] *= s;
        }
        Ok((v, b))
    }
}

fn column_scales(v: &DMatrix<f64>) -> Vec<f64> {
    (0..v.ncols())
        .map(|i| {
            let m = v.column(i).amax();
            if m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        })
        .collect()
}

/// Orthonormal basis of the orthogonal complement of `range(v)`.
pub(crate) fn orthonormal_complement(v: &DMatrix<f64>) -> DMatrix<f64> {
    let n = v.nrows();
    if v.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    let qr = ColPivQr::new(v);
    let rank = qr.rank(RANK_TOL);
    qr.q().columns(rank, n - rank).clone_owned()
}

fn consistency(v: &DMatrix<f64>, b: &DVector<f64>, basis: &PolyBasis) -> Consistency {
    let m = b.len();
    if m == 0 {
        return Consistency {
            consistent: true,
            residual: 0.0,
            rank: 0,
            violated: None,
        };
    }
    let qr = ColPivQr::new(&v.transpose());
    let rank = qr.rank(RANK_TOL);
    let q = qr.q();
    let q1 = q.columns(0, rank);
    let proj = q1 * (q1.transpose() * b);
    let resid = b - proj;
    let residual = resid.norm();
    let consistent = residual <= CONSISTENCY_TOL * (1.0 + b.norm());
    let violated = if consistent {
        None
    } else {
        Some(basis.members()[resid.iamax()].clone())
    };
    Consistency {
        consistent,
        residual,
        rank,
        violated,
    }
}

/// Bunch–Kaufman on `[[cK, V], [Vᵀ, 0]]`; `None` when the factorization is
/// near-singular or badly conditioned.
fn solve_kkt(
    k: &DMatrix<f64>,
    v: &DMatrix<f64>,
    f: &DVector<f64>,
    b: &DVector<f64>,
) -> Option<(DVector<f64>, DVector<f64>, f64)> {
    let (n, m) = v.shape();
    let kmax = k.amax();
    let c = if kmax > 0.0 { 1.0 / kmax } else { 1.0 };
    let mut a = DMatrix::zeros(n + m, n + m);
    a.view_mut((0, 0), (n, n)).copy_from(&(k * c));
    a.view_mut((0, n), (n, m)).copy_from(v);
    a.view_mut((n, 0), (m, n)).copy_from(&v.transpose());
    let mut rhs = DVector::zeros(n + m);
    rhs.rows_mut(0, n).copy_from(&(f * c));
    rhs.rows_mut(n, m).copy_from(b);
    let fac = SymmetricIndefinite::factor(&a, PIVOT_TOL).ok()?;
    let cond = fac.condition_1norm(&a);
    if !cond.is_finite() || cond > MAX_KKT_CONDITION {
        return None;
    }
    let x = fac.solve(&rhs);
    let w = x.rows(0, n).clone_owned();
    let aux = x.rows(n, m) / c;
    Some((w, aux, cond))
}

/// Restricts `wᵀKw − 2fᵀw` to the affine set `Vᵀw = b` through an orthonormal
/// basis of `ker Vᵀ`.
fn solve_nullspace(
    k: &DMatrix<f64>,
    v: &DMatrix<f64>,
    f: &DVector<f64>,
    b: &DVector<f64>,
    rank: usize,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    let (n, m) = v.shape();
    let (w_p, q2) = if m == 0 || rank == 0 {
        (DVector::zeros(n), DMatrix::identity(n, n))
    } else {
        let qr = ColPivQr::new(v);
        let perm = qr.perm();
        let r = qr.r();
        // R11ᵀ y = (Πᵀ b)[..rank]
        let mut y = DVector::zeros(rank);
        for i in 0..rank {
            let s: f64 = (0..i).map(|j| r[(j, i)] * y[j]).sum();
            y[i] = (b[perm[i]] - s) / r[(i, i)];
        }
        let q = qr.q();
        (q.columns(0, rank) * y, q.columns(rank, n - rank).clone_owned())
    };
    let free = q2.ncols();
    let (w, cond) = if free == 0 {
        (w_p, 1.0)
    } else {
        let g = q2.transpose() * k * &q2;
        let g = (&g + g.transpose()) * 0.5;
        let rhs = q2.transpose() * (f - k * &w_p);
        let chol = g.clone().cholesky().ok_or_else(|| {
            Error::SingularSystem("kernel block is not positive definite on the moment nullspace".into())
        })?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if !(lo * lo > MIN_REDUCED_PIVOT * hi * hi) {
            return Err(Error::SingularSystem(format!(
                "reduced kernel block has pivot ratio {:e}",
                (lo / hi).powi(2)
            )));
        }
        (w_p + &q2 * chol.solve(&rhs), (hi / lo).powi(2))
    };
    let aux = if m == 0 {
        DVector::zeros(0)
    } else {
        let resid = f - k * &w;
        let svd = v.clone().svd(true, true);
        let smax = svd.singular_values.max();
        svd.solve(&resid, RANK_TOL * smax)
            .map_err(|e| Error::SingularSystem(e.to_string()))?
    };
    Ok((w, aux, cond))
}

/// `Σ w_j f_j`.
pub fn apply_stencil(w: &[f64], fvals: &[f64]) -> Result<f64> {
    if w.len() != fvals.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: fvals.len(),
        });
    }
    Ok(w.iter().zip(fvals).map(|(a, b)| a * b).sum())
}
