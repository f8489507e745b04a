//! Command-line front end: config parsing, subcommands and JSON reports.

pub mod config;
pub mod converge;
pub mod functions;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use self::config::LoadedConfig;
use self::converge::{default_levels, run_convergence, ConvergenceReport};
use self::functions::TestFunction;
use crate::accuracy::PowerReport;
use crate::bounds::{certify, BoundOptions, BoundReport, SamplingOptions, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::growth::{growth_dual, growth_primal, GrowthStatus, GrowthValue};
use crate::stencil::{Diagnostics, StencilProblem};
use crate::Error;

pub const SCHEMA: &str = "stencilcert/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    /// 2 for inconsistent moments, 3 for a singular system, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(Error::InconsistentMoments { .. }) => 2,
            CliError::Compute(Error::SingularSystem(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "stencilcert",
    version,
    about = "Kernel differentiation stencils with certified error bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute stencil weights; CSV on stdout or `--out`.
    Weights {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the diagnostics JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Weights, power function, growth function and error bound as JSON.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Polynomial growth function as JSON.
    Growth {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the dual weights and extremal polynomial as CSV here.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Error, power function and bound over a sequence of dilations.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated scale factors; defaults to 1, 1/2, ..., 1/32.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        /// Write one CSV row per level here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Node CSV overriding the config's `points`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled seminorm estimates.
    #[arg(long)]
    pub seed: Option<u64>,
}

struct Context {
    loaded: LoadedConfig,
    problem: StencilProblem,
    out: Option<PathBuf>,
    sampling: SamplingOptions,
}

impl Context {
    fn new(args: &CommonArgs) -> Result<Self, CliError> {
        let loaded = LoadedConfig::load(&args.config)?;
        let problem = loaded.problem(args.points.as_deref())?;
        let out = loaded.out_path(args.out.as_deref());
        let sampling = SamplingOptions {
            samples: loaded.config.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: args.seed.or(loaded.config.seed).unwrap_or(DEFAULT_SEED),
        };
        Ok(Self {
            loaded,
            problem,
            out,
            sampling,
        })
    }

    fn bound_options(&self) -> BoundOptions {
        BoundOptions {
            sampling: self.sampling,
            q_override: self.loaded.config.q,
            mu_override: self.loaded.config.mu,
            ..BoundOptions::default()
        }
    }

    fn q_mu(&self) -> (u32, f64) {
        let sm = self.problem.kernel().smoothness();
        let q = self.loaded.config.q.unwrap_or(self.problem.s().max(sm.r / 2 + 1));
        let mu = self.loaded.config.mu.unwrap_or((f64::from(sm.r) + sm.gamma) / 2.0);
        (q, mu)
    }
}

#[derive(Serialize)]
struct WeightsReport<'a> {
    schema: &'static str,
    command: &'static str,
    kernel: String,
    nodes: usize,
    weights: &'a [f64],
    aux: &'a [f64],
    diagnostics: &'a Diagnostics,
}

#[derive(Serialize)]
struct GrowthSummary {
    value: GrowthValue,
    status: GrowthStatus,
    mu: f64,
    q: u32,
}

#[derive(Serialize)]
struct CertifyReport<'a> {
    schema: &'static str,
    command: &'static str,
    kernel: String,
    nodes: usize,
    p: f64,
    rho: GrowthValue,
    rhs: GrowthValue,
    certified: Option<bool>,
    weights: &'a [f64],
    diagnostics: &'a Diagnostics,
    power: &'a PowerReport,
    growth: GrowthSummary,
    bound: &'a BoundReport,
}

#[derive(Serialize)]
struct GrowthReport {
    schema: &'static str,
    command: &'static str,
    value: GrowthValue,
    status: GrowthStatus,
    mu: f64,
    q: u32,
    primal_value: GrowthValue,
    primal_status: GrowthStatus,
}

#[derive(Serialize)]
struct ConvergeOutput<'a> {
    schema: &'static str,
    command: &'static str,
    kernel: String,
    #[serde(flatten)]
    report: &'a ConvergenceReport,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Shortest round-trip formatting, with exponents for tiny or huge values.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn weights_csv(weights: &[f64]) -> String {
    weights.iter().fold(String::new(), |mut s, w| {
        let _ = writeln!(s, "{}", fmt_f64(*w));
        s
    })
}

fn cmd_weights(common: &CommonArgs, report: Option<&Path>) -> Result<(), CliError> {
    let ctx = Context::new(common)?;
    let res = ctx.problem.compute_weights()?;
    emit(ctx.out.as_deref(), &weights_csv(&res.weights))?;
    if let Some(path) = report {
        let rep = WeightsReport {
            schema: SCHEMA,
            command: "weights",
            kernel: ctx.problem.kernel().name(),
            nodes: res.weights.len(),
            weights: &res.weights,
            aux: &res.aux,
            diagnostics: &res.diagnostics,
        };
        emit(Some(path), &to_json(&rep)?)?;
    }
    Ok(())
}

fn cmd_certify(common: &CommonArgs) -> Result<(), CliError> {
    let ctx = Context::new(common)?;
    let cert = certify(&ctx.problem, &ctx.bound_options())?;
    let rep = CertifyReport {
        schema: SCHEMA,
        command: "certify",
        kernel: ctx.problem.kernel().name(),
        nodes: cert.stencil.weights.len(),
        p: cert.power.p,
        rho: cert.bound.rho,
        rhs: cert.bound.rhs,
        certified: cert.bound.certified,
        weights: &cert.stencil.weights,
        diagnostics: &cert.stencil.diagnostics,
        power: &cert.power,
        growth: GrowthSummary {
            value: cert.growth.value,
            status: cert.growth.status,
            mu: cert.growth.mu,
            q: cert.growth.q,
        },
        bound: &cert.bound,
    };
    emit(ctx.out.as_deref(), &to_json(&rep)?)
}

fn cmd_growth(common: &CommonArgs, certificates: Option<&Path>) -> Result<(), CliError> {
    let ctx = Context::new(common)?;
    let (q, mu) = ctx.q_mu();
    let ps = ctx.problem.points();
    let op = ctx.problem.operator();
    let dual = growth_dual(ps, q, op, mu)?;
    let primal = growth_primal(ps, q, op, mu)?;
    let rep = GrowthReport {
        schema: SCHEMA,
        command: "growth",
        value: dual.value,
        status: dual.status,
        mu,
        q,
        primal_value: primal.value,
        primal_status: primal.status,
    };
    emit(ctx.out.as_deref(), &to_json(&rep)?)?;
    if let Some(path) = certificates {
        let mut csv = String::from("kind,index,value\n");
        for (i, w) in dual.dual_weights.iter().flatten().enumerate() {
            let _ = writeln!(csv, "dual_weight,{i},{}", fmt_f64(*w));
        }
        for (i, c) in primal.primal_poly.iter().flatten().enumerate() {
            let _ = writeln!(csv, "primal_coeff,{i},{}", fmt_f64(*c));
        }
        emit(Some(path), &csv)?;
    }
    Ok(())
}

fn cmd_converge(common: &CommonArgs, levels: Option<&[f64]>, table: Option<&Path>) -> Result<(), CliError> {
    let ctx = Context::new(common)?;
    let levels = levels.map(<[f64]>::to_vec).unwrap_or_else(default_levels);
    let f = ctx
        .loaded
        .config
        .test_function
        .clone()
        .unwrap_or_else(|| TestFunction::default_for(ctx.problem.points().dim()));
    let report = run_convergence(&ctx.problem, &levels, &f, &ctx.bound_options())?;
    let out = ConvergeOutput {
        schema: SCHEMA,
        command: "converge",
        kernel: ctx.problem.kernel().name(),
        report: &report,
    };
    emit(ctx.out.as_deref(), &to_json(&out)?)?;
    if let Some(path) = table {
        let mut csv = String::from("h,error,p,rho,rhs\n");
        for r in &report.levels {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_f64(r.h),
                fmt_f64(r.error),
                fmt_f64(r.p),
                r.rho,
                r.rhs
            );
        }
        emit(Some(path), &csv)?;
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Weights { common, report } => cmd_weights(common, report.as_deref()),
        Command::Certify { common } => cmd_certify(common),
        Command::Growth { common, certificates } => cmd_growth(common, certificates.as_deref()),
        Command::Converge { common, levels, table } => cmd_converge(common, levels.as_deref(), table.as_deref()),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
