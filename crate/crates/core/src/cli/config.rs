use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::functions::TestFunction;
use super::CliError;
use crate::geometry::{MultiIndex, Point, PointSet};
use crate::kernels::{DiffOperator, KernelSpec};
use crate::stencil::StencilProblem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelConfig {
    Phs { nu: f64, s: u32 },
    Tps { n: u32, s: u32, gamma: Option<f64> },
    Wendland { d: u32, n: u32, s: u32 },
}

impl KernelConfig {
    pub fn build(&self) -> crate::Result<KernelSpec> {
        match *self {
            KernelConfig::Phs { nu, s } => KernelSpec::phs(nu, s),
            KernelConfig::Tps { n, s, gamma } => {
                let k = KernelSpec::tps(n, s)?;
                match gamma {
                    Some(g) => k.with_gamma(g),
                    None => Ok(k),
                }
            }
            KernelConfig::Wendland { d, n, s } => KernelSpec::wendland(d, n, s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTerm {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kernel: KernelConfig,
    pub operator: Vec<OperatorTerm>,
    pub center: Vec<f64>,
    /// CSV of nodes, relative to the config file.
    pub points: Option<PathBuf>,
    pub q: Option<u32>,
    pub mu: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub test_function: Option<TestFunction>,
}

/// A parsed config with paths resolved against its directory.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ProblemConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let config: ProblemConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Builds the problem; `points_override` is taken relative to the working directory.
    pub fn problem(&self, points_override: Option<&Path>) -> Result<StencilProblem, CliError> {
        let cfg = &self.config;
        let kernel = cfg.kernel.build()?;
        let center = Point::new(cfg.center.clone())?;
        let dim = center.dim();
        let terms = cfg
            .operator
            .iter()
            .map(|t| (MultiIndex::new(t.alpha.clone()), t.coeff))
            .collect();
        let op = DiffOperator::new(dim, terms)?;
        let points_path = match (points_override, &cfg.points) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.resolve(p),
            (None, None) => return Err(CliError::Config("no points file given".into())),
        };
        let nodes = read_points(&points_path, dim)?;
        let ps = PointSet::new(center, nodes)?;
        Ok(StencilProblem::new(kernel, op, ps)?)
    }

    pub fn out_path(&self, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.config.out.as_ref().map(|p| self.resolve(p)))
    }
}

/// One node per row, `dim` comma-separated numbers, no header.
pub fn read_points(path: &Path, dim: usize) -> Result<Vec<Point>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut nodes = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let coords = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("{} row {}: {e}", path.display(), line + 1)))?;
        if coords.len() != dim {
            return Err(CliError::Config(format!(
                "{} row {}: expected {dim} coordinates, found {}",
                path.display(),
                line + 1,
                coords.len()
            )));
        }
        nodes.push(Point::new(coords)?);
    }
    if nodes.is_empty() {
        return Err(CliError::Config(format!("{}: no points", path.display())));
    }
    Ok(nodes)
}
