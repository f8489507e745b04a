//! Radial profiles and the `g_j` recursion used to differentiate them.
//!
//! A profile is stored as a finite sum of terms `ρ^e (a + b log ρ)`, which is
//! closed under `L = (1/ρ) d/dρ`. Partial derivatives of `Φ(x) = φ(‖x‖)` are
//! then sums of monomials in `x` times `g_j = L^j φ`, via `∂_i g_j = x_i g_{j+1}`.

use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ProfileTerm {
    pub coef: f64,
    pub log_coef: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RadialProfile {
    pub terms: Vec<ProfileTerm>,
    /// Radius beyond which the profile vanishes identically.
    pub support: Option<f64>,
}

impl RadialProfile {
    pub fn power(coef: f64, exponent: f64) -> Self {
        Self {
            terms: vec![ProfileTerm {
                coef,
                log_coef: 0.0,
                exponent,
            }],
            support: None,
        }
    }

    pub fn power_log(log_coef: f64, exponent: f64) -> Self {
        Self {
            terms: vec![ProfileTerm {
                coef: 0.0,
                log_coef,
                exponent,
            }],
            support: None,
        }
    }

    /// Polynomial `Σ c_m ρ^m` on `[0, 1)`, zero beyond.
    pub fn compact_polynomial(coeffs: &[f64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(m, &c)| ProfileTerm {
                coef: c,
                log_coef: 0.0,
                exponent: m as f64,
            })
            .collect();
        Self {
            terms,
            support: Some(1.0),
        }
    }

    /// `(1/ρ) d/dρ` applied termwise:
    /// `ρ^e (a + b log ρ) ↦ ρ^{e-2} (e a + b + e b log ρ)`.
    pub fn apply_l(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let coef = t.exponent * t.coef + t.log_coef;
                let log_coef = t.exponent * t.log_coef;
                (coef != 0.0 || log_coef != 0.0).then_some(ProfileTerm {
                    coef,
                    log_coef,
                    exponent: t.exponent - 2.0,
                })
            })
            .collect();
        Self {
            terms,
            support: self.support,
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        if let Some(s) = self.support {
            if rho >= s {
                return 0.0;
            }
        }
        if rho == 0.0 {
            return self.limit_at_zero().unwrap_or(f64::NAN);
        }
        let log_rho = rho.ln();
        self.terms
            .iter()
            .map(|t| {
                let base = if t.log_coef != 0.0 {
                    t.coef + t.log_coef * log_rho
                } else {
                    t.coef
                };
                base * rho.powf(t.exponent)
            })
            .sum()
    }

    /// Finite limit as `ρ → 0⁺`, or `None` when it does not exist.
    pub fn limit_at_zero(&self) -> Option<f64> {
        let mut value = 0.0;
        for t in &self.terms {
            if t.exponent > 0.0 {
                continue;
            }
            if t.exponent == 0.0 && t.log_coef == 0.0 {
                value += t.coef;
                continue;
            }
            return None;
        }
        Some(value)
    }

    /// Upper bound of `sup_{0<ρ≤ρ_max} |ρ^shift · profile(ρ)|` from the triangle
    /// inequality, available when no logarithms or negative powers remain.
    pub fn abs_bound(&self, shift: u32, rho_max: f64) -> Option<f64> {
        let rho_max = match self.support {
            Some(s) => rho_max.min(s),
            None => rho_max,
        };
        let mut bound = 0.0;
        for t in &self.terms {
            let e = t.exponent + f64::from(shift);
            if t.log_coef != 0.0 || e < 0.0 {
                return None;
            }
            bound += t.coef.abs() * if e == 0.0 { 1.0 } else { rho_max.powf(e) };
        }
        Some(bound)
    }

    /// Polynomial coefficients `c_m` of an ordinary polynomial profile.
    pub fn polynomial_coeffs(&self) -> Option<Vec<f64>> {
        let mut out: Vec<f64> = Vec::new();
        for t in &self.terms {
            if t.log_coef != 0.0 || t.exponent < 0.0 || t.exponent.fract() != 0.0 {
                return None;
            }
            let m = t.exponent as usize;
            if out.len() <= m {
                out.resize(m + 1, 0.0);
            }
            out[m] += t.coef;
        }
        Some(out)
    }
}

/// One term `coef · x^mono · g_j(‖x‖)` of a radial partial derivative.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DerivativeTerm {
    pub coef: f64,
    pub mono: Vec<u32>,
    pub j: usize,
}

/// Symbolic expansion of `∂^α Φ` for a radial `Φ`.
pub(crate) fn derivative_terms(alpha: &[u32]) -> Vec<DerivativeTerm> {
    let d = alpha.len();
    let mut terms: BTreeMap<(Vec<u32>, usize), f64> = BTreeMap::new();
    terms.insert((vec![0; d], 0), 1.0);
    for (axis, &times) in alpha.iter().enumerate() {
        for _ in 0..times {
            let mut next: BTreeMap<(Vec<u32>, usize), f64> = BTreeMap::new();
            for ((mono, j), c) in terms {
                if mono[axis] > 0 {
                    let mut lowered = mono.clone();
                    lowered[axis] -= 1;
                    *next.entry((lowered, j)).or_insert(0.0) += c * f64::from(mono[axis]);
                }
                let mut raised = mono;
                raised[axis] += 1;
                *next.entry((raised, j + 1)).or_insert(0.0) += c;
            }
            terms = next;
        }
    }
    terms
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((mono, j), coef)| DerivativeTerm { coef, mono, j })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_operator_on_powers() {
        // φ = ρ³: g1 = 3ρ, g2 = 3/ρ
        let g0 = RadialProfile::power(1.0, 3.0);
        let g1 = g0.apply_l();
        assert_eq!(g1.eval(2.0), 6.0);
        assert_eq!(g1.limit_at_zero(), Some(0.0));
        let g2 = g1.apply_l();
        assert!((g2.eval(2.0) - 1.5).abs() < 1e-15);
        assert_eq!(g2.limit_at_zero(), None);
    }

    #[test]
    fn l_operator_on_log_terms() {
        // φ = ρ² log ρ: g1 = 2 log ρ + 1
        let g1 = RadialProfile::power_log(1.0, 2.0).apply_l();
        let e = std::f64::consts::E;
        assert!((g1.eval(e) - 3.0).abs() < 1e-14);
        assert_eq!(g1.limit_at_zero(), None);
    }

    #[test]
    fn polynomial_constants_vanish_under_l() {
        let p = RadialProfile::compact_polynomial(&[1.0, 0.0, -3.0]);
        let g1 = p.apply_l();
        assert_eq!(g1.terms.len(), 1);
        assert_eq!(g1.eval(0.5), -6.0);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(2.0), 0.0);
    }

    #[test]
    fn second_derivative_terms() {
        // ∂²/∂x1² Φ = g1 + x1² g2
        let t = derivative_terms(&[2, 0]);
        assert_eq!(
            t,
            vec![
                DerivativeTerm {
                    coef: 1.0,
                    mono: vec![0, 0],
                    j: 1
                },
                DerivativeTerm {
                    coef: 1.0,
                    mono: vec![2, 0],
                    j: 2
                },
            ]
        );
        // ∂x1 ∂x2 Φ = x1 x2 g2
        let t = derivative_terms(&[1, 1]);
        assert_eq!(
            t,
            vec![DerivativeTerm {
                coef: 1.0,
                mono: vec![1, 1],
                j: 2
            }]
        );
    }
}
