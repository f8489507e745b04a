//! Translation-invariant radial kernels of finite smoothness and their derivatives.
//!
//! Three families are supported:
//!
//! * polyharmonic splines `Φ(x) = (−1)^⌈ν/2⌉ ‖x‖^ν`, `ν > 0` not an even integer,
//!   conditionally positive definite of order `s ≥ ⌈ν/2⌉`, with
//!   `Φ ∈ C^{r,γ}` for `r = ⌈ν⌉ − 1`, `γ = ν − r`;
//! * thin plate splines `Φ(x) = (−1)^{n+1} ‖x‖^{2n} log ‖x‖`, order `s ≥ n + 1`,
//!   `Φ ∈ C^{2n−1,γ}` for every `γ < 1`;
//! * Wendland functions `φ_{d,n}` with unit support, strictly positive definite,
//!   `Φ ∈ C^{2n,1}`.
//!
//! Mixed partials use `∂^{α,β}K(x,y) = (−1)^{|β|} ∂^{α+β}Φ(x − y)`.

mod operator;
pub(crate) mod radial;

use serde::{Deserialize, Serialize};

pub use operator::DiffOperator;

use crate::error::{Error, Result};
use crate::geometry::{norm, MultiIndex, Point};
use radial::{derivative_terms, RadialProfile};

/// Default Hölder exponent used for thin plate splines.
pub const TPS_DEFAULT_GAMMA: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelFamily {
    Phs { nu: f64 },
    Tps { n: u32 },
    Wendland { d: u32, n: u32 },
}

/// Hölder class `C^{r,γ}` of the kernel's generating function `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub r: u32,
    pub gamma: f64,
}

/// A kernel family together with the polynomial order `s` used alongside it.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    family: KernelFamily,
    cpd_order: u32,
    smoothness: Smoothness,
    /// `g_0, g_1, …` precomputed up to `r + 2`.
    profiles: Vec<RadialProfile>,
}

impl PartialEq for KernelSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.cpd_order == other.cpd_order && self.smoothness == other.smoothness
    }
}

impl KernelSpec {
    /// Polyharmonic spline of exponent `nu` with polynomial order `s`.
    pub fn phs(nu: f64, s: u32) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidKernel(format!("PHS exponent must be positive, got {nu}")));
        }
        if (nu / 2.0).fract() == 0.0 {
            return Err(Error::InvalidKernel(format!(
                "PHS exponent must not be an even integer, got {nu}"
            )));
        }
        let r = nu.ceil() as u32 - 1;
        let smoothness = Smoothness {
            r,
            gamma: nu - f64::from(r),
        };
        let sign = if ((nu / 2.0).ceil() as u32).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        Self::build(KernelFamily::Phs { nu }, s, smoothness, RadialProfile::power(sign, nu))
    }

    /// Thin plate spline `‖x‖^{2n} log ‖x‖` with polynomial order `s`; the Hölder
    /// exponent defaults to [`TPS_DEFAULT_GAMMA`].
    pub fn tps(n: u32, s: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidKernel("TPS order n must be at least 1".into()));
        }
        let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        Self::build(
            KernelFamily::Tps { n },
            s,
            Smoothness {
                r: 2 * n - 1,
                gamma: TPS_DEFAULT_GAMMA,
            },
            RadialProfile::power_log(sign, f64::from(2 * n)),
        )
    }

    /// Wendland function `φ_{d,n}` (unit support), `d ≤ 3`, `n ≤ 2`.
    pub fn wendland(d: u32, n: u32, s: u32) -> Result<Self> {
        let coeffs = wendland_coefficients(d, n).ok_or_else(|| {
            Error::InvalidKernel(format!(
                "Wendland functions are available for d in 1..=3 and n in 0..=2, got d={d}, n={n}"
            ))
        })?;
        Self::build(
            KernelFamily::Wendland { d, n },
            s,
            Smoothness { r: 2 * n, gamma: 1.0 },
            RadialProfile::compact_polynomial(&coeffs),
        )
    }

    fn build(family: KernelFamily, s: u32, smoothness: Smoothness, g0: RadialProfile) -> Result<Self> {
        let mut profiles = vec![g0];
        for _ in 0..smoothness.r + 2 {
            let next = profiles.last().unwrap().apply_l();
            profiles.push(next);
        }
        let spec = Self {
            family,
            cpd_order: s,
            smoothness,
            profiles,
        };
        if s < spec.min_cpd_order() {
            return Err(Error::InvalidKernel(format!(
                "{} is conditionally positive definite only for s >= {}, got s={s}",
                spec.name(),
                spec.min_cpd_order()
            )));
        }
        Ok(spec)
    }

    /// Overrides the Hölder exponent of a thin plate spline, `0 < γ < 1`.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        match self.family {
            KernelFamily::Tps { .. } if gamma > 0.0 && gamma < 1.0 => {
                self.smoothness.gamma = gamma;
                Ok(self)
            }
            KernelFamily::Tps { .. } => Err(Error::InvalidKernel(format!(
                "TPS Hölder exponent must lie in (0,1), got {gamma}"
            ))),
            _ => Err(Error::InvalidKernel(
                "the Hölder exponent is fixed for this kernel family".into(),
            )),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn cpd_order(&self) -> u32 {
        self.cpd_order
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn min_cpd_order(&self) -> u32 {
        match self.family {
            KernelFamily::Phs { nu } => (nu / 2.0).ceil() as u32,
            KernelFamily::Tps { n } => n + 1,
            KernelFamily::Wendland { .. } => 0,
        }
    }

    /// `(r, γ, s_min)`.
    pub fn smoothness_metadata(&self) -> (u32, f64, u32) {
        (self.smoothness.r, self.smoothness.gamma, self.min_cpd_order())
    }

    pub fn name(&self) -> String {
        match self.family {
            KernelFamily::Phs { nu } => format!("PHS(nu={nu})"),
            KernelFamily::Tps { n } => format!("TPS(n={n})"),
            KernelFamily::Wendland { d, n } => format!("Wendland(d={d}, n={n})"),
        }
    }

    /// Checks that the kernel may be used in ambient dimension `dim`.
    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        match self.family {
            KernelFamily::Wendland { d, .. } if dim > d as usize => Err(Error::InvalidKernel(format!(
                "{} is positive definite only up to dimension {d}, got {dim}",
                self.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Checks the family constraint on the operator order `k` under which the
    /// improved error bound holds: `ν > 2k` (PHS), `n ≥ k + 1` (TPS), `n ≥ k`
    /// (Wendland).
    pub fn check_operator_order(&self, k: u32) -> Result<()> {
        let (ok, requirement) = match self.family {
            KernelFamily::Phs { nu } => (nu > f64::from(2 * k), "nu > 2k"),
            KernelFamily::Tps { n } => (n > k, "n >= k + 1"),
            KernelFamily::Wendland { n, .. } => (n >= k, "n >= k"),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OperatorNotAdmissible {
                order: k,
                kernel: self.name(),
                requirement: requirement.into(),
            })
        }
    }

    /// `g_j(ρ) = ((1/ρ) d/dρ)^j φ(ρ)`, with the limit value at `ρ = 0`.
    ///
    /// Orders with `2j > r + 1` are rejected, as are radius-zero evaluations
    /// whose limit does not exist.
    pub fn radial_profile_derivative(&self, j: u32, radius: f64) -> Result<f64> {
        let max = self.smoothness.r + 1;
        if 2 * j > max || !(radius >= 0.0) {
            return Err(Error::SmoothnessExceeded { order: 2 * j, max });
        }
        let g = &self.profiles[j as usize];
        if radius == 0.0 {
            return g.limit_at_zero().ok_or(Error::SmoothnessExceeded { order: 2 * j, max });
        }
        Ok(g.eval(radius))
    }

    pub(crate) fn profile(&self, j: usize) -> RadialProfile {
        if j < self.profiles.len() {
            self.profiles[j].clone()
        } else {
            let mut g = self.profiles.last().unwrap().clone();
            for _ in self.profiles.len() - 1..j {
                g = g.apply_l();
            }
            g
        }
    }

    /// `∂^α Φ(x)` for `|α| ≤ r`.
    pub fn phi_partial(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        let order = alpha.order();
        if order > self.smoothness.r {
            return Err(Error::SmoothnessExceeded {
                order,
                max: self.smoothness.r,
            });
        }
        self.phi_partial_any(alpha.exponents(), x)
    }

    /// `∂^α Φ(x)` without the smoothness gate. At `x = 0` only the pure radial
    /// terms survive; their limits must exist.
    pub(crate) fn phi_partial_any(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        let rho = norm(x);
        let terms = derivative_terms(alpha);
        if rho == 0.0 {
            let mut value = 0.0;
            for t in terms.iter().filter(|t| t.mono.iter().all(|&m| m == 0)) {
                let order: u32 = alpha.iter().sum();
                let limit = self
                    .profiles_get(t.j)
                    .limit_at_zero()
                    .ok_or(Error::SmoothnessExceeded {
                        order,
                        max: self.smoothness.r,
                    })?;
                value += t.coef * limit;
            }
            return Ok(value);
        }
        if let KernelFamily::Wendland { .. } = self.family {
            if rho >= 1.0 {
                return Ok(0.0);
            }
        }
        let mut g_cache: Vec<Option<f64>> = vec![None; terms.iter().map(|t| t.j).max().unwrap_or(0) + 1];
        let mut value = 0.0;
        for t in &terms {
            let g = match g_cache[t.j] {
                Some(g) => g,
                None => {
                    let g = self.profiles_get(t.j).eval(rho);
                    g_cache[t.j] = Some(g);
                    g
                }
            };
            let mono: f64 = t.mono.iter().zip(x).map(|(&m, &xi)| xi.powi(m as i32)).product();
            value += t.coef * mono * g;
        }
        Ok(value)
    }

    fn profiles_get(&self, j: usize) -> std::borrow::Cow<'_, RadialProfile> {
        if j < self.profiles.len() {
            std::borrow::Cow::Borrowed(&self.profiles[j])
        } else {
            std::borrow::Cow::Owned(self.profile(j))
        }
    }

    /// `Φ(0)`.
    pub fn value_at_origin(&self) -> f64 {
        self.profiles[0].limit_at_zero().unwrap_or(0.0)
    }

    /// `K(x, y) = Φ(x − y)`.
    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        let diff = x.sub(y);
        let rho = norm(&diff);
        if rho == 0.0 {
            return self.value_at_origin();
        }
        self.profiles[0].eval(rho)
    }

    /// `∂^{α,β} K(x, y)`, with `α` acting on `x` and `β` on `y`.
    pub fn kernel_partial(&self, alpha: &MultiIndex, beta: &MultiIndex, x: &Point, y: &Point) -> Result<f64> {
        if alpha.dim() != x.dim() || beta.dim() != x.dim() || y.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: if alpha.dim() != x.dim() {
                    alpha.dim()
                } else if beta.dim() != x.dim() {
                    beta.dim()
                } else {
                    y.dim()
                },
            });
        }
        let sign = if beta.order().is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * self.phi_partial(&alpha.add(beta), &x.sub(y))?)
    }

    /// `D′K(z, x) = Σ_α a_α ∂^{α,0} K(z, x)`.
    pub fn operator_apply_kernel(&self, op: &DiffOperator, z: &Point, x: &Point) -> Result<f64> {
        let zero = MultiIndex::zero(z.dim());
        let mut acc = 0.0;
        for (alpha, a) in op.terms() {
            acc += a * self.kernel_partial(alpha, &zero, z, x)?;
        }
        Ok(acc)
    }

    /// `D′D″K(z, z) = Σ_{α,β} a_α a_β ∂^{α,β} K(z, z)`.
    pub fn operator_apply_both(&self, op: &DiffOperator, z: &Point) -> Result<f64> {
        let mut acc = 0.0;
        for (alpha, a) in op.terms() {
            for (beta, b) in op.terms() {
                acc += a * b * self.kernel_partial(alpha, beta, z, z)?;
            }
        }
        Ok(acc)
    }
}

/// Expanded polynomial coefficients of `φ_{d,n}` on `[0,1]`, built from the
/// factored forms `(1−ρ)^{ℓ+n} p_{ℓ,n}(ρ)` with `ℓ = ⌊d/2⌋ + n + 1`.
fn wendland_coefficients(d: u32, n: u32) -> Option<Vec<f64>> {
    let (power, factor): (u32, &[f64]) = match (d, n) {
        (1, 0) => (1, &[1.0]),
        (1, 1) => (3, &[1.0, 3.0]),
        (1, 2) => (5, &[1.0, 5.0, 8.0]),
        (2 | 3, 0) => (2, &[1.0]),
        (2 | 3, 1) => (4, &[1.0, 4.0]),
        (2 | 3, 2) => (6, &[3.0, 18.0, 35.0]),
        _ => return None,
    };
    let mut poly = factor.to_vec();
    for _ in 0..power {
        let mut next = vec![0.0; poly.len() + 1];
        for (m, c) in poly.iter().enumerate() {
            next[m] += c;
            next[m + 1] -= c;
        }
        poly = next;
    }
    Some(poly)
}
