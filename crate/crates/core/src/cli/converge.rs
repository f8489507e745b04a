use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::TestFunction;
use crate::bounds::{certify, BoundOptions, HolderEstimate};
use crate::growth::GrowthValue;
use crate::stencil::{apply_stencil, StencilProblem};
use crate::{Error, Result};

/// Relative size below which a value is treated as round-off.
const ROUND_OFF: f64 = 1e-12;
/// Slope tolerance before a series is flagged.
const SLOPE_SLACK: f64 = 0.1;
/// Log-scale deviation always tolerated at the coarsest level.
const OUTLIER_FLOOR: f64 = 0.05;
pub const MIN_LEVELS: usize = 4;

pub fn default_levels() -> Vec<f64> {
    (0..6).map(|i| 0.5f64.powi(i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub h: f64,
    pub error: f64,
    pub p: f64,
    pub rho: GrowthValue,
    pub rhs: GrowthValue,
    pub certified: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Ok,
    /// Too few levels above round-off to fit.
    Degenerate,
    /// Some level has an infinite value.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub status: FitStatus,
    pub slope: Option<f64>,
    pub levels_used: usize,
    pub excluded_coarsest: bool,
    pub below_prediction: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub predicted_order: f64,
    pub test_function: TestFunction,
    pub phi_seminorm: HolderEstimate,
    pub levels: Vec<LevelRow>,
    pub error: SeriesFit,
    pub p: SeriesFit,
    pub rhs: SeriesFit,
    pub flagged: bool,
}

struct Sample {
    row: LevelRow,
    error_noise: f64,
    p_noise: f64,
    seminorm: HolderEstimate,
}

fn run_level(problem: &StencilProblem, h: f64, f: &TestFunction, opts: &BoundOptions) -> Result<Sample> {
    let scaled = problem.scaled(h)?;
    let cert = certify(&scaled, opts)?;
    let ps = scaled.points();
    let fvals: Vec<f64> = ps.nodes().iter().map(|x| f.eval(x)).collect();
    let exact = f.apply_operator(scaled.operator(), ps.center())?;
    let approx = apply_stencil(&cert.stencil.weights, &fvals)?;
    let wf: f64 = cert
        .stencil
        .weights
        .iter()
        .zip(&fvals)
        .map(|(w, v)| (w * v).abs())
        .sum();
    Ok(Sample {
        row: LevelRow {
            h,
            error: (exact - approx).abs(),
            p: cert.power.p,
            rho: cert.bound.rho,
            rhs: cert.bound.rhs,
            certified: cert.bound.certified,
        },
        error_noise: ROUND_OFF * (exact.abs() + wf),
        p_noise: (ROUND_OFF * cert.power.q_scale).sqrt(),
        seminorm: cert.bound.phi_seminorm,
    })
}

/// Least-squares line through `(log h, log v)`.
struct LogLogLine {
    slope: f64,
    mean_x: f64,
    mean_y: f64,
}

impl LogLogLine {
    fn fit(points: &[(f64, f64)]) -> Self {
        let n = points.len() as f64;
        let mean_x = points.iter().map(|(h, _)| h.ln()).sum::<f64>() / n;
        let mean_y = points.iter().map(|(_, v)| v.ln()).sum::<f64>() / n;
        let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), (h, v)| {
            let dx = h.ln() - mean_x;
            (sxy + dx * (v.ln() - mean_y), sxx + dx * dx)
        });
        Self {
            slope: sxy / sxx,
            mean_x,
            mean_y,
        }
    }

    fn residual(&self, (h, v): (f64, f64)) -> f64 {
        v.ln() - (self.mean_y + self.slope * (h.ln() - self.mean_x))
    }
}

/// Fits a slope to `(h, value)` pairs whose value sits above its noise floor.
///
/// The coarsest level is dropped when its distance from the line through the
/// other levels exceeds three times their largest residual.
pub fn fit_series(samples: &[(f64, f64, f64)], predicted: f64) -> SeriesFit {
    let empty = |status| SeriesFit {
        status,
        slope: None,
        levels_used: 0,
        excluded_coarsest: false,
        below_prediction: false,
    };
    if samples.iter().any(|(_, v, _)| v.is_infinite()) {
        return empty(FitStatus::Infinite);
    }
    let mut points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v, noise)| *v > *noise && *v > 0.0)
        .map(|&(h, v, _)| (h, v))
        .collect();
    if points.len() < 3 {
        return empty(FitStatus::Degenerate);
    }
    points.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut slope = LogLogLine::fit(&points).slope;
    let mut excluded = false;
    if points.len() >= MIN_LEVELS {
        let rest = LogLogLine::fit(&points[1..]);
        let others = points[1..].iter().fold(0.0f64, |m, &p| m.max(rest.residual(p).abs()));
        if rest.residual(points[0]).abs() > (3.0 * others).max(OUTLIER_FLOOR) {
            slope = rest.slope;
            excluded = true;
        }
    }
    SeriesFit {
        status: FitStatus::Ok,
        slope: Some(slope),
        levels_used: points.len() - usize::from(excluded),
        excluded_coarsest: excluded,
        below_prediction: slope < predicted - SLOPE_SLACK,
    }
}

/// Certifies the problem dilated by each `h` and fits observed rates.
///
/// The seminorm ball is fixed at the coarsest level so every level shares
/// one value of `|Φ|`.
pub fn run_convergence(
    problem: &StencilProblem,
    levels: &[f64],
    f: &TestFunction,
    opts: &BoundOptions,
) -> Result<ConvergenceReport> {
    if levels.len() < MIN_LEVELS {
        return Err(Error::InvalidArgument(format!(
            "a convergence study needs at least {MIN_LEVELS} levels, got {}",
            levels.len()
        )));
    }
    if let Some(h) = levels.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidArgument(format!("levels must be positive, got {h}")));
    }
    f.check_dimension(problem.points().dim())?;
    let h_max = levels.iter().cloned().fold(0.0, f64::max);
    let mut opts = *opts;
    if opts.ball_radius.is_none() {
        opts.ball_radius = Some(problem.points().segment_diameter() * h_max);
    }
    let samples = levels
        .par_iter()
        .map(|&h| run_level(problem, h, f, &opts))
        .collect::<Result<Vec<_>>>()?;

    let sm = problem.kernel().smoothness();
    let predicted = (f64::from(sm.r) + sm.gamma) / 2.0 - f64::from(problem.operator().order());
    let error = fit_series(
        &samples
            .iter()
            .map(|s| (s.row.h, s.row.error, s.error_noise))
            .collect::<Vec<_>>(),
        predicted,
    );
    let p = fit_series(
        &samples
            .iter()
            .map(|s| (s.row.h, s.row.p, s.p_noise))
            .collect::<Vec<_>>(),
        predicted,
    );
    let rhs = fit_series(
        &samples
            .iter()
            .map(|s| (s.row.h, s.row.rhs.as_f64(), 0.0))
            .collect::<Vec<_>>(),
        predicted,
    );
    let flagged = [&error, &p, &rhs].iter().any(|s| s.below_prediction);
    let phi_seminorm = samples[0].seminorm.clone();
    Ok(ConvergenceReport {
        predicted_order: predicted,
        test_function: f.clone(),
        phi_seminorm,
        levels: samples.into_iter().map(|s| s.row).collect(),
        error,
        p,
        rhs,
        flagged,
    })
}
