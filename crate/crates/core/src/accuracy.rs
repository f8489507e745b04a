//! Power functions and native-space test functions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kernels::{DiffOperator, KernelSpec};
use crate::polyspace::{PolyBasis, Polynomial};
use crate::stencil::{orthonormal_complement, StencilProblem, StencilResult};

/// Squared norm of the error functional `δ_z∘D − Σ w_j δ_{x_j}`:
/// `D′D″K(z,z) − 2 Σ w_j D′K(z,x_j) + Σ_{ij} w_i w_j K(x_i,x_j)`.
///
/// `w` must reproduce polynomials of degree `< s`.
pub fn quadratic_form(problem: &StencilProblem, w: &[f64]) -> Result<f64> {
    let (resid, tol) = problem.exactness_residual(w)?;
    if !(resid <= tol) {
        return Err(Error::ExactnessViolated { residual: resid });
    }
    let w = DVector::from_column_slice(w);
    let ddk = problem
        .kernel()
        .operator_apply_both(problem.operator(), problem.points().center())?;
    let f = problem.kernel_rhs()?;
    let k = problem.kernel_matrix();
    Ok(ddk - 2.0 * w.dot(&f) + w.dot(&(k * &w)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    /// `Q(w*)` as computed; may be slightly negative from round-off.
    pub q_wstar: f64,
    pub p: f64,
    /// `D′D″K(z,z) − Σ w*_j D′K(z,x_j) − Σ v_i Dp_i(z)`.
    pub shortcut: f64,
    /// `D′D″K(z,z) − Σ w*_j D′K(z,x_j)`, without the polynomial term.
    pub literal_shortcut: f64,
    /// `|q_wstar − shortcut|`.
    pub gap: f64,
    /// Sum of the magnitudes of the terms in `Q(w*)`, the scale of its round-off.
    pub q_scale: f64,
}

pub fn power_function(problem: &StencilProblem) -> Result<PowerReport> {
    let stencil = problem.compute_weights()?;
    power_report(problem, &stencil)
}

/// Power report for weights already computed with the problem's own basis.
pub fn power_report(problem: &StencilProblem, stencil: &StencilResult) -> Result<PowerReport> {
    let q = quadratic_form(problem, &stencil.weights)?;
    let z = problem.points().center();
    let ddk = problem.kernel().operator_apply_both(problem.operator(), z)?;
    let f = problem.kernel_rhs()?;
    let wf: f64 = stencil.weights.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
    let moments = problem.basis().operator_moments(problem.operator())?;
    let vb: f64 = stencil.aux.iter().zip(moments.iter()).map(|(a, b)| a * b).sum();
    let literal = ddk - wf;
    let shortcut = literal - vb;
    let wabs = DVector::from_iterator(stencil.weights.len(), stencil.weights.iter().map(|x| x.abs()));
    let kabs = problem.kernel_matrix().abs();
    let q_scale = ddk.abs() + 2.0 * wabs.dot(&f.abs()) + wabs.dot(&(kabs * &wabs));
    Ok(PowerReport {
        q_wstar: q,
        p: q.max(0.0).sqrt(),
        shortcut,
        literal_shortcut: literal,
        gap: (q - shortcut).abs(),
        q_scale,
    })
}

/// `f(x) = Σ a_i K(x, c_i) + p(x)` with `Σ a_i q(c_i) = 0` for all `q ∈ Π^d_s`.
///
/// The polynomial part is expressed in monomials centered at the origin.
#[derive(Clone, Debug)]
pub struct NativeTestFunction {
    kernel: KernelSpec,
    centers: Vec<Point>,
    a: Vec<f64>,
    poly: Polynomial,
    norm_sq: f64,
}

const MOMENT_TOL: f64 = 1e-10;

impl NativeTestFunction {
    pub fn new(kernel: &KernelSpec, s: u32, centers: Vec<Point>, a: Vec<f64>, poly_coeffs: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidArgument("test function needs at least one center".into()));
        }
        if a.len() != centers.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: centers.len(),
            });
        }
        if s < kernel.min_cpd_order() {
            return Err(Error::InvalidArgument(format!(
                "s = {s} is below the kernel's order {}",
                kernel.min_cpd_order()
            )));
        }
        let d = centers[0].dim();
        kernel.check_dimension(d)?;
        let basis = PolyBasis::new(s, Point::origin(d));
        let v = basis.vandermonde(&centers)?;
        let av = DVector::from_column_slice(&a);
        let moment = (v.transpose() * &av).amax();
        let scale = av.lp_norm(1) * v.amax().max(1.0);
        if moment > MOMENT_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::MomentConditionViolated { residual: moment });
        }
        let poly = Polynomial::new(basis, poly_coeffs)?;
        let mut norm_sq = 0.0;
        for (i, ci) in centers.iter().enumerate() {
            for (j, cj) in centers.iter().enumerate() {
                norm_sq += a[i] * a[j] * kernel.eval(ci, cj);
            }
        }
        Ok(Self {
            kernel: kernel.clone(),
            centers,
            a,
            poly,
            norm_sq,
        })
    }

    /// Coefficients drawn uniformly from `[−1, 1]` and projected onto the
    /// moment-free subspace, plus a random polynomial part.
    pub fn random<R: Rng + ?Sized>(kernel: &KernelSpec, s: u32, centers: Vec<Point>, rng: &mut R) -> Result<Self> {
        let d = centers.first().map(Point::dim).unwrap_or(1);
        let basis = PolyBasis::new(s, Point::origin(d));
        let mut v = basis.vandermonde(&centers)?;
        for i in 0..v.ncols() {
            let m = v.column(i).amax();
            if m > 0.0 {
                v.column_mut(i).unscale_mut(m);
            }
        }
        let null = orthonormal_complement(&v);
        if null.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "centers admit no nonzero moment-free coefficients".into(),
            ));
        }
        let t = DVector::from_fn(null.ncols(), |_, _| rng.gen_range(-1.0..1.0));
        let a: DVector<f64> = &null * t;
        let poly_coeffs = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self::new(kernel, s, centers, a.iter().copied().collect(), poly_coeffs)
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// `‖f‖_K = (aᵀKa)^{1/2}`, clamped at zero.
    pub fn norm_k(&self) -> f64 {
        self.norm_sq.max(0.0).sqrt()
    }

    pub fn norm_k_squared(&self) -> f64 {
        self.norm_sq
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let k: f64 = self
            .centers
            .iter()
            .zip(&self.a)
            .map(|(c, a)| a * self.kernel.eval(x, c))
            .sum();
        k + self.poly.eval(x)
    }

    /// `Df(z)` through kernel derivatives.
    pub fn apply_operator(&self, op: &DiffOperator, z: &Point) -> Result<f64> {
        let mut acc = self.poly.apply_operator(op, z)?;
        for (c, a) in self.centers.iter().zip(&self.a) {
            acc += a * self.kernel.operator_apply_kernel(op, z, c)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferentiationError {
    pub error: f64,
    /// `P · ‖f‖_K`.
    pub bound: f64,
}

pub fn differentiation_error(problem: &StencilProblem, f: &NativeTestFunction) -> Result<DifferentiationError> {
    let stencil = problem.compute_weights()?;
    let power = power_report(problem, &stencil)?;
    differentiation_error_with(problem, &stencil.weights, power.p, f)
}

/// Variant reusing weights and `P` across many test functions.
pub fn differentiation_error_with(
    problem: &StencilProblem,
    weights: &[f64],
    p: f64,
    f: &NativeTestFunction,
) -> Result<DifferentiationError> {
    let z = problem.points().center();
    let exact = f.apply_operator(problem.operator(), z)?;
    let vals: Vec<f64> = problem.points().nodes().iter().map(|x| f.eval(x)).collect();
    let approx = crate::stencil::apply_stencil(weights, &vals)?;
    Ok(DifferentiationError {
        error: (exact - approx).abs(),
        bound: p * f.norm_k(),
    })
}

/// `ε_w″K(·, c) = D′K(z, c) − Σ_j w_j K(x_j, c)` at each center.
pub fn error_functional_on_kernel(problem: &StencilProblem, w: &[f64], centers: &[Point]) -> Result<Vec<f64>> {
    let z = problem.points().center();
    let k = problem.kernel();
    centers
        .iter()
        .map(|c| {
            let mut v = k.operator_apply_kernel(problem.operator(), z, c)?;
            for (x, wj) in problem.points().nodes().iter().zip(w) {
                v -= wj * k.eval(x, c);
            }
            Ok(v)
        })
        .collect()
}

/// Kernel matrix between two point lists.
pub fn cross_kernel_matrix(kernel: &KernelSpec, xs: &[Point], ys: &[Point]) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), ys.len(), |i, j| kernel.eval(&xs[i], &ys[j]))
}
