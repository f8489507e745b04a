//! Hölder constants, kernel seminorms and the assembled error bound
//! `P ≤ ρ_{q,D}(z, X, (r+γ)/2) · (C_{d,r} |Φ|_{C^{r,γ}(B)})^{1/2}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::accuracy::{power_report, PowerReport};
use crate::error::{Error, Result};
use crate::geometry::{factorial, multi_indices_of_degree, norm, MultiIndex, Point, PointSet};
use crate::growth::{growth_dual, GrowthResult, GrowthValue};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::stencil::{StencilProblem, StencilResult};

pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

/// `C_{d,r}`: `2d^{r/2} / Π_{i≤⌊r/2⌋} (γ/2 + i)²` for even `r`,
/// `d^{r/2} / Π_{i≤⌊r/2⌋} ((1+γ)/2 + i)²` for odd `r`.
pub fn cdr_constant(d: usize, r: u32, gamma: f64) -> f64 {
    let half = r / 2;
    let (lead, shift) = if r.is_multiple_of(2) {
        (2.0, gamma / 2.0)
    } else {
        (1.0, (1.0 + gamma) / 2.0)
    };
    let denom: f64 = (1..=half).map(|i| (shift + f64::from(i)).powi(2)).product();
    lead * (d as f64).powf(f64::from(r) / 2.0) / denom
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormMode {
    ExactClosedForm,
    /// Triangle-inequality bound on the next derivative; never below the true value.
    UpperBound,
    /// Supremum over sampled pairs; never above the true value.
    SampledLowerEstimate,
}

impl SeminormMode {
    /// Whether a bound built from this value is guaranteed.
    pub fn certifies(self) -> bool {
        !matches!(self, SeminormMode::SampledLowerEstimate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub value: f64,
    pub mode: SeminormMode,
    pub r: u32,
    pub gamma: f64,
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// `|Φ|_{C^{r,γ}(B)}` on the ball of the given radius around the origin, in
/// ambient dimension `dim`.
///
/// Closed forms are used for one-dimensional PHS and Wendland kernels. For
/// Lipschitz classes (`γ = 1`) in higher dimension the gradient of `∂^αΦ` is
/// bounded term by term. Everything else is sampled.
pub fn phi_holder_seminorm(
    kernel: &KernelSpec,
    dim: usize,
    radius: f64,
    opts: SamplingOptions,
) -> Result<HolderEstimate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let sm = kernel.smoothness();
    let base = HolderEstimate {
        value: 0.0,
        mode: SeminormMode::ExactClosedForm,
        r: sm.r,
        gamma: sm.gamma,
        radius,
        samples: None,
        seed: None,
    };
    match kernel.family() {
        KernelFamily::Phs { nu } if dim == 1 => {
            let c: f64 = (0..sm.r).map(|i| nu - f64::from(i)).product();
            let factor = if sm.r.is_multiple_of(2) {
                1.0
            } else {
                2f64.powf(1.0 - sm.gamma)
            };
            return Ok(HolderEstimate {
                value: c.abs() * factor,
                ..base
            });
        }
        KernelFamily::Wendland { .. } if dim == 1 => {
            let coeffs = kernel
                .profile(0)
                .polynomial_coeffs()
                .expect("Wendland profile is polynomial");
            let deriv = poly_derivative(&coeffs, sm.r + 1);
            return Ok(HolderEstimate {
                value: poly_abs_max(&deriv, radius.min(1.0)),
                ..base
            });
        }
        _ => {}
    }
    if sm.gamma == 1.0 {
        if let Some(v) = lipschitz_upper_bound(kernel, dim, radius) {
            return Ok(HolderEstimate {
                value: v,
                mode: SeminormMode::UpperBound,
                ..base
            });
        }
    }
    let mut best = 0.0f64;
    for alpha in multi_indices_of_degree(dim, sm.r) {
        let f = |x: &[f64]| kernel.phi_partial(&alpha, x);
        best = best.max(holder_seminorm_sampled(dim, radius, sm.gamma, opts, f)?);
    }
    Ok(HolderEstimate {
        value: best,
        mode: SeminormMode::SampledLowerEstimate,
        samples: Some(opts.samples),
        seed: Some(opts.seed),
        ..base
    })
}

/// `max_{|α|=r} sup |∇∂^αΦ|` bounded by `(Σ_i B_i²)^{1/2}` with `B_i ≥ sup|∂^{α+e_i}Φ|`.
fn lipschitz_upper_bound(kernel: &KernelSpec, dim: usize, radius: f64) -> Option<f64> {
    let r = kernel.smoothness().r;
    let mut best = 0.0f64;
    for alpha in multi_indices_of_degree(dim, r) {
        let mut sq = 0.0;
        for axis in 0..dim {
            let raised = alpha.add(&MultiIndex::axis(dim, axis, 1));
            let mut bound = 0.0;
            for t in crate::kernels::radial::derivative_terms(raised.exponents()) {
                let shift: u32 = t.mono.iter().sum();
                bound += t.coef.abs() * kernel.profile(t.j).abs_bound(shift, radius)?;
            }
            sq += bound * bound;
        }
        best = best.max(sq.sqrt());
    }
    Some(best)
}

fn poly_derivative(coeffs: &[f64], times: u32) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..times {
        if c.len() <= 1 {
            return vec![0.0];
        }
        c = c.iter().enumerate().skip(1).map(|(m, v)| m as f64 * v).collect();
    }
    c
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// `max_{0≤t≤b} |p(t)|` from endpoints and bisected critical points.
fn poly_abs_max(coeffs: &[f64], b: f64) -> f64 {
    let dp = poly_derivative(coeffs, 1);
    let mut best = poly_eval(coeffs, 0.0).abs().max(poly_eval(coeffs, b).abs());
    let grid = 2048;
    let mut prev_t = 0.0;
    let mut prev = poly_eval(&dp, 0.0);
    for k in 1..=grid {
        let t = b * k as f64 / grid as f64;
        let cur = poly_eval(&dp, t);
        best = best.max(poly_eval(coeffs, t).abs());
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if poly_eval(&dp, lo).signum() == poly_eval(&dp, mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(poly_eval(coeffs, 0.5 * (lo + hi)).abs());
        }
        prev_t = t;
        prev = cur;
    }
    best
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Halton sequence with a seeded Cranley–Patterson rotation. The first `n`
/// points do not depend on how many are drawn afterwards.
#[derive(Clone, Debug)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension too large");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            shift: (0..dim).map(|_| rng.gen::<f64>()).collect(),
            index: 0,
        }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| (radical_inverse(self.index, b) + s).fract())
            .collect()
    }
}

/// Sampled `sup |f(x) − f(y)| / ‖x − y‖^γ` over the ball of the given radius.
/// Pairs `(x, y)`, `(x, 0)` and `(x, −x)` are visited for every sampled `x`.
pub fn holder_seminorm_sampled<F>(dim: usize, radius: f64, gamma: f64, opts: SamplingOptions, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut seq = Halton::new(2 * dim, opts.seed);
    let origin = vec![0.0; dim];
    let f0 = f(&origin)?;
    let mut best = 0.0f64;
    let mut accepted = 0;
    let mut tries = 0;
    while accepted < opts.samples && tries < 64 * opts.samples.max(1) {
        tries += 1;
        let u = seq.next_point();
        let x: Vec<f64> = u[..dim].iter().map(|t| radius * (2.0 * t - 1.0)).collect();
        let y: Vec<f64> = u[dim..].iter().map(|t| radius * (2.0 * t - 1.0)).collect();
        if norm(&x) > radius || norm(&y) > radius {
            continue;
        }
        accepted += 1;
        let fx = f(&x)?;
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for (other, fo) in [(y.clone(), f(&y)?), (origin.clone(), f0), (neg.clone(), f(&neg)?)] {
            let diff: Vec<f64> = x.iter().zip(&other).map(|(a, b)| a - b).collect();
            let dist = norm(&diff);
            if dist > 0.0 {
                best = best.max((fx - fo).abs() / dist.powf(gamma));
            }
        }
    }
    Ok(best)
}

/// Point pairs on `S_{z,X} = ∪ [z, x_i]`, excluding `z`: all node pairs, then
/// `samples` quasi-random pairs.
pub fn segment_pairs(ps: &PointSet, samples: usize, seed: u64) -> Vec<(Point, Point)> {
    let z = ps.center();
    let ends: Vec<&Point> = ps.nodes().iter().filter(|x| x.dist(z) > 0.0).collect();
    let mut pairs = Vec::with_capacity(ends.len() * ends.len() + samples);
    if ends.is_empty() {
        return pairs;
    }
    for a in &ends {
        for b in &ends {
            pairs.push(((*a).clone(), (*b).clone()));
        }
    }
    let mut seq = Halton::new(4, seed);
    let n = ends.len();
    for _ in 0..samples {
        let u = seq.next_point();
        let i = ((u[0] * n as f64) as usize).min(n - 1);
        let j = ((u[2] * n as f64) as usize).min(n - 1);
        let x = z.lerp(ends[i], 1.0 - u[1]);
        let y = z.lerp(ends[j], 1.0 - u[3]);
        if x.dist(z) > 0.0 && y.dist(z) > 0.0 {
            pairs.push((x, y));
        }
    }
    pairs
}

/// `sup |Δ_{z,x,y} U| / (‖x − z‖^γ ‖y − z‖^γ)` over the given pairs, where
/// `Δ_{z,x,y}U = U(x,y) − U(x,z) − U(z,y) + U(z,z)`.
pub fn mixed_difference_sup<U>(z: &Point, pairs: &[(Point, Point)], gamma: f64, u: U) -> Result<f64>
where
    U: Fn(&Point, &Point) -> Result<f64>,
{
    let uzz = u(z, z)?;
    let mut best = 0.0f64;
    for (x, y) in pairs {
        let delta = u(x, y)? - u(x, z)? - u(z, y)? + uzz;
        let denom = (x.dist(z) * y.dist(z)).powf(gamma);
        best = best.max(delta.abs() / denom);
    }
    Ok(best)
}

/// Sampled lower estimate of `|K|_{z,X,m+γ}`:
/// `Π_{i≤m}(γ+i)^{−2} (Σ_{|α|=|β|=m} (m!/α!)(m!/β!) |∂^{α,β}K|²_{z,X,γ})^{1/2}`.
/// For `m = 0` this is the plain `|K|_{z,X,γ}`.
pub fn mixed_kernel_seminorm_estimate(
    kernel: &KernelSpec,
    ps: &PointSet,
    m: u32,
    gamma: f64,
    opts: SamplingOptions,
) -> Result<f64> {
    let pairs = segment_pairs(ps, opts.samples, opts.seed);
    let z = ps.center();
    let d = ps.dim();
    let indices = multi_indices_of_degree(d, m);
    let mfact = factorial(m);
    let mut acc = 0.0;
    for alpha in &indices {
        for beta in &indices {
            let sup = mixed_difference_sup(z, &pairs, gamma, |x, y| kernel.kernel_partial(alpha, beta, x, y))?;
            acc += (mfact / alpha.factorial()) * (mfact / beta.factorial()) * sup * sup;
        }
    }
    let prefactor: f64 = (1..=m).map(|i| (gamma + f64::from(i)).powi(2)).product();
    Ok(acc.sqrt() / prefactor)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// `μ = (r+γ)/2`, `q = max{s, ⌊r/2⌋+1}`, seminorm `C_{d,r}|Φ|`.
    Improved,
    /// `μ = q` with a sampled `|K|_{z,X,q}`.
    Classical { q: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mode: BoundMode,
    pub rho: GrowthValue,
    pub c_dr: f64,
    pub phi_seminorm: HolderEstimate,
    pub rhs: GrowthValue,
    pub q: u32,
    pub mu: f64,
    pub p: f64,
    /// `P ≤ rhs`, only when the seminorm value is guaranteed.
    pub certified: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Everything computed for one certified problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub stencil: StencilResult,
    pub power: PowerReport,
    pub growth: GrowthResult,
    pub bound: BoundReport,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundOptions {
    pub mode: BoundMode,
    pub sampling: SamplingOptions,
    pub q_override: Option<u32>,
    pub mu_override: Option<f64>,
    /// Ball radius for `|Φ|`; defaults to `diam S_{z,X}`.
    pub ball_radius: Option<f64>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            mode: BoundMode::Improved,
            sampling: SamplingOptions::default(),
            q_override: None,
            mu_override: None,
            ball_radius: None,
        }
    }
}

pub fn assemble_error_bound(problem: &StencilProblem) -> Result<BoundReport> {
    Ok(certify(problem, &BoundOptions::default())?.bound)
}

/// Weights, power function, growth function and bound for one problem.
pub fn certify(problem: &StencilProblem, opts: &BoundOptions) -> Result<Certificate> {
    let stencil = problem.compute_weights()?;
    let power = power_report(problem, &stencil)?;
    let kernel = problem.kernel();
    let ps = problem.points();
    let d = ps.dim();
    let sm = kernel.smoothness();
    let s = problem.s();
    let mut notes = Vec::new();
    let radius = opts.ball_radius.unwrap_or_else(|| ps.segment_diameter());

    let (q, mu, c_dr, seminorm) = match opts.mode {
        BoundMode::Improved => {
            let q = opts.q_override.unwrap_or(s.max(sm.r / 2 + 1));
            let mu = opts.mu_override.unwrap_or((f64::from(sm.r) + sm.gamma) / 2.0);
            let seminorm = if radius > 0.0 {
                phi_holder_seminorm(kernel, d, radius, opts.sampling)?
            } else {
                HolderEstimate {
                    value: 0.0,
                    mode: SeminormMode::ExactClosedForm,
                    r: sm.r,
                    gamma: sm.gamma,
                    radius,
                    samples: None,
                    seed: None,
                }
            };
            (q, mu, cdr_constant(d, sm.r, sm.gamma), seminorm)
        }
        BoundMode::Classical { q } => {
            let k = problem.operator().order();
            if q < s.max(k + 1) || q > sm.r {
                return Err(Error::InvalidArgument(format!(
                    "classical bound needs max(s, k+1) <= q <= r, got q = {q} with s = {s}, k = {k}, r = {}",
                    sm.r
                )));
            }
            let value = mixed_kernel_seminorm_estimate(kernel, ps, q - 1, 1.0, opts.sampling)?;
            let seminorm = HolderEstimate {
                value,
                mode: SeminormMode::SampledLowerEstimate,
                r: q - 1,
                gamma: 1.0,
                radius,
                samples: Some(opts.sampling.samples),
                seed: Some(opts.sampling.seed),
            };
            (q, opts.mu_override.unwrap_or(f64::from(q)), 1.0, seminorm)
        }
    };
    if sm.r / 2 == 0 && opts.mode == BoundMode::Improved {
        notes.push("r/2 < 1: the mixed kernel seminorm is the plain mixed-difference seminorm".into());
    }
    let growth = growth_dual(ps, q, problem.operator(), mu)?;
    let rhs = match growth.value {
        GrowthValue::Finite(rho) => GrowthValue::Finite(rho * (c_dr * seminorm.value).sqrt()),
        GrowthValue::Infinite => GrowthValue::Infinite,
    };
    let certified = seminorm.mode.certifies().then_some(match rhs {
        GrowthValue::Finite(v) => power.p <= v * (1.0 + 1e-8) + 1e-300,
        GrowthValue::Infinite => true,
    });
    let bound = BoundReport {
        mode: opts.mode,
        rho: growth.value,
        c_dr,
        phi_seminorm: seminorm,
        rhs,
        q,
        mu,
        p: power.p,
        certified,
        notes,
    };
    Ok(Certificate {
        stencil,
        power,
        growth,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::Rng;

    use super::*;
    use crate::kernels::DiffOperator;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn cdr_examples() {
        assert_relative_eq!(cdr_constant(1, 2, 1.0), 8.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(cdr_constant(2, 2, 1.0), 16.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(cdr_constant(1, 3, 1.0), 0.25, max_relative = 1e-15);
        assert_eq!(cdr_constant(3, 0, 0.5), 2.0);
        assert_eq!(cdr_constant(3, 1, 0.5), 3f64.sqrt());
    }

    /// Rising products via the Gamma-function recurrence, written out separately.
    #[test]
    fn cdr_matches_recomputation() {
        fn rising(a: f64, n: u32) -> f64 {
            let mut v = 1.0;
            let mut x = a + 1.0;
            for _ in 0..n {
                v *= x;
                x += 1.0;
            }
            v
        }
        for d in 1..=3usize {
            for r in 0..=6u32 {
                for gamma in [0.1, 0.5, 0.9, 1.0] {
                    let m = r / 2;
                    let expect = if r % 2 == 0 {
                        2.0 * (d as f64).powi(m as i32) / rising(gamma / 2.0, m).powi(2)
                    } else {
                        (d as f64).powi(m as i32) * (d as f64).sqrt() / rising((1.0 + gamma) / 2.0, m).powi(2)
                    };
                    assert_relative_eq!(cdr_constant(d, r, gamma), expect, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn phs_closed_forms() {
        let k = KernelSpec::phs(3.0, 2).unwrap();
        let est = phi_holder_seminorm(&k, 1, 0.3, SamplingOptions::default()).unwrap();
        assert_eq!(est.value, 6.0);
        assert_eq!(est.mode, SeminormMode::ExactClosedForm);
        // ν = 2.5: r = 2, γ = 0.5, φ″ = 2.5·1.5 |t|^0.5
        let k = KernelSpec::phs(2.5, 2).unwrap();
        assert_relative_eq!(
            phi_holder_seminorm(&k, 1, 1.0, SamplingOptions::default())
                .unwrap()
                .value,
            3.75
        );
        // ν = 1.5: r = 1, γ = 0.5, φ′ = 1.5 sgn(t)|t|^0.5
        let k = KernelSpec::phs(1.5, 1).unwrap();
        assert_relative_eq!(
            phi_holder_seminorm(&k, 1, 1.0, SamplingOptions::default())
                .unwrap()
                .value,
            1.5 * 2f64.sqrt()
        );
    }

    #[test]
    fn closed_forms_dominate_samples() {
        for k in [
            KernelSpec::phs(3.0, 2).unwrap(),
            KernelSpec::phs(1.5, 1).unwrap(),
            KernelSpec::phs(5.0, 3).unwrap(),
            KernelSpec::wendland(1, 1, 0).unwrap(),
            KernelSpec::wendland(3, 2, 0).unwrap(),
        ] {
            let exact = phi_holder_seminorm(&k, 1, 0.8, SamplingOptions::default()).unwrap();
            let r = exact.r;
            let alpha = MultiIndex::new(vec![r]);
            let sampled = holder_seminorm_sampled(1, 0.8, exact.gamma, SamplingOptions::default(), |x| {
                k.phi_partial(&alpha, x)
            })
            .unwrap();
            assert!(
                sampled <= exact.value * (1.0 + 1e-9),
                "{}: {sampled} > {}",
                k.name(),
                exact.value
            );
            assert!(
                sampled >= 0.9 * exact.value,
                "{}: {sampled} vs {}",
                k.name(),
                exact.value
            );
        }
    }

    #[test]
    fn upper_bounds_dominate_samples() {
        for k in [KernelSpec::wendland(3, 1, 0).unwrap(), KernelSpec::phs(3.0, 2).unwrap()] {
            for dim in [2, 3] {
                let est = phi_holder_seminorm(&k, dim, 0.7, SamplingOptions::default()).unwrap();
                assert_eq!(est.mode, SeminormMode::UpperBound);
                let mut sampled = 0.0f64;
                for alpha in multi_indices_of_degree(dim, est.r) {
                    sampled = sampled.max(
                        holder_seminorm_sampled(dim, 0.7, 1.0, SamplingOptions::default(), |x| {
                            k.phi_partial(&alpha, x)
                        })
                        .unwrap(),
                    );
                }
                assert!(sampled <= est.value);
            }
        }
    }

    #[test]
    fn tps_is_sampled_and_reproducible() {
        let k = KernelSpec::tps(1, 2).unwrap();
        let a = phi_holder_seminorm(&k, 2, 1.0, SamplingOptions::default()).unwrap();
        let b = phi_holder_seminorm(&k, 2, 1.0, SamplingOptions::default()).unwrap();
        assert_eq!(a.mode, SeminormMode::SampledLowerEstimate);
        assert!(a.value > 0.0);
        assert_eq!(a, b);
        assert!(!a.mode.certifies());
    }

    #[test]
    fn constant_shift_invariance() {
        let k = KernelSpec::tps(2, 3).unwrap();
        let alpha = MultiIndex::new(vec![0]);
        let opts = SamplingOptions::default();
        let a = holder_seminorm_sampled(1, 1.0, 0.9, opts, |x| k.phi_partial(&alpha, x)).unwrap();
        let b = holder_seminorm_sampled(1, 1.0, 0.9, opts, |x| Ok(k.phi_partial(&alpha, x)? + 7.5)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn wendland_one_dimensional_closed_form() {
        // φ_{1,0} = (1−t)₊: the seminorm of φ itself is its Lipschitz constant 1
        let k = KernelSpec::wendland(1, 0, 0).unwrap();
        assert_relative_eq!(
            phi_holder_seminorm(&k, 1, 2.0, SamplingOptions::default())
                .unwrap()
                .value,
            1.0
        );
        // φ_{1,1} = 1 − 6t² + 8t³ − 3t⁴ on [0,1]: φ‴ = 48 − 72t
        let k = KernelSpec::wendland(1, 1, 0).unwrap();
        assert_relative_eq!(
            phi_holder_seminorm(&k, 1, 2.0, SamplingOptions::default())
                .unwrap()
                .value,
            48.0,
            max_relative = 1e-12
        );
        // φ_{1,2} = (1−t)⁵(8t²+5t+1): |φ⁽⁵⁾| peaks inside the interval
        let k = KernelSpec::wendland(1, 2, 0).unwrap();
        let v = phi_holder_seminorm(&k, 1, 2.0, SamplingOptions::default())
            .unwrap()
            .value;
        assert!(v > 0.0);
    }

    #[test]
    fn separable_functions_have_zero_mixed_seminorm() {
        let ps = PointSet::new(p(&[0.1, 0.0]), vec![p(&[1.0, 0.5]), p(&[-0.5, 0.2]), p(&[0.0, -1.0])]).unwrap();
        let pairs = segment_pairs(&ps, 500, 1);
        let v = mixed_difference_sup(ps.center(), &pairs, 0.5, |x, y| {
            Ok(x.coords()[0].sin() + (y.coords()[1] * 3.0).exp())
        })
        .unwrap();
        assert!(v < 1e-12);
    }

    #[test]
    fn mixed_estimate_below_phi_bound() {
        let k = KernelSpec::phs(3.0, 2).unwrap();
        let ps = PointSet::from_1d(0.5, &[0.0, 1.0]).unwrap();
        let est = mixed_kernel_seminorm_estimate(&k, &ps, 1, 0.5, SamplingOptions { samples: 2000, seed: 3 }).unwrap();
        assert!(est > 0.0);
        assert!(est <= cdr_constant(1, 2, 1.0) * 6.0);
    }

    #[test]
    fn doubling_samples_never_decreases() {
        let k = KernelSpec::phs(3.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let nodes: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ps = PointSet::from_1d(0.05, &nodes).unwrap();
        let mut prev = 0.0;
        for samples in [16, 32, 64, 128, 256, 512] {
            let v = mixed_kernel_seminorm_estimate(&k, &ps, 1, 0.5, SamplingOptions { samples, seed: 5 }).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn midpoint_bound() {
        let pr = StencilProblem::new(
            KernelSpec::phs(3.0, 2).unwrap(),
            DiffOperator::identity(1),
            PointSet::from_1d(0.5, &[0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let b = assemble_error_bound(&pr).unwrap();
        assert_relative_eq!(b.rho.as_f64(), 0.5f64.powf(1.5), max_relative = 1e-12);
        assert_relative_eq!(b.c_dr, 8.0 / 9.0, max_relative = 1e-15);
        assert_eq!(b.phi_seminorm.value, 6.0);
        assert_relative_eq!(
            b.rhs.as_f64(),
            0.5f64.powf(1.5) * (16.0f64 / 3.0).sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(b.rhs.as_f64(), 0.816496580927726, max_relative = 1e-9);
        assert_eq!(b.certified, Some(true));
        assert_eq!((b.q, b.mu), (2, 1.5));
    }

    #[test]
    fn zero_bound_when_center_is_a_node() {
        let pr = StencilProblem::new(
            KernelSpec::phs(3.0, 2).unwrap(),
            DiffOperator::identity(1),
            PointSet::from_1d(0.0, &[0.0, 1.0, -0.5]).unwrap(),
        )
        .unwrap();
        let b = assemble_error_bound(&pr).unwrap();
        assert_eq!(b.rho, GrowthValue::Finite(0.0));
        assert_eq!(b.rhs, GrowthValue::Finite(0.0));
        assert_eq!(b.p, 0.0);
    }

    #[test]
    fn inconsistent_problem_has_no_bound() {
        let pr = StencilProblem::new(
            KernelSpec::phs(3.0, 2).unwrap(),
            DiffOperator::partial(2, 1),
            PointSet::new(p(&[0.0, 0.0]), vec![p(&[-1.0, 0.0]), p(&[1.0, 0.0])]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            assemble_error_bound(&pr),
            Err(Error::InconsistentMoments { .. })
        ));
    }

    #[test]
    fn wendland_parameters() {
        let pr = StencilProblem::new(
            KernelSpec::wendland(3, 1, 0).unwrap(),
            DiffOperator::partial(2, 0),
            PointSet::new(
                p(&[0.0, 0.0]),
                vec![
                    p(&[0.2, 0.0]),
                    p(&[-0.2, 0.0]),
                    p(&[0.0, 0.2]),
                    p(&[0.0, -0.2]),
                    p(&[0.1, 0.1]),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let b = assemble_error_bound(&pr).unwrap();
        assert_eq!(b.q, 2);
        assert_eq!(b.mu, 1.5);
        assert_eq!(b.certified, Some(true));
    }
}
