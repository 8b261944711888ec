//! Command-line front end: argument parsing, configuration layering and the
//! exit-code contract (0 ok, 1 verification or path failure, 2 bad input).

mod commands;
pub mod config;
mod output;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{Format, RunConfig};
pub use verify::{run_verify, NumericCheck, VerifyReport};

use crate::pathwise::PathError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        use crate::operator::OperatorError;
        match e {
            PathError::Csv { .. }
            | PathError::BadDomain(..)
            | PathError::ZeroInitial
            | PathError::Operator(OperatorError::ZeroCoordinate(_))
            | PathError::Operator(OperatorError::NonFinite) => CliError::Config(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "epme", version, about = "Verification and path experiments for the split operator H")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for point sampling (overrides the config file and EPME_SEED).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance override, e.g. `--tol eigen=1e-8`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    pub tol: Vec<String>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the symbolic and numeric verification suites.
    Verify(VerifyArgs),
    /// Eigenvalues of H and H^2 at a point, and of the (H^2, H') pencil with jets.
    Eigen(PointArgs),
    /// Singular values of H with the closed-form b and q.
    Svd(PointArgs),
    /// Integrate w' = H w along a path and emit the solution.
    Simulate(PathArgs),
    /// Integrate along a path and classify its measure dissipation.
    Dissipation(PathArgs),
    /// Circular-section geometry of the hyperellipsoid of H.
    Section(SectionArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub points: Option<usize>,
    /// Adds one to H at 1-based entry `R,C` before verifying.
    #[arg(long, hide = true, value_name = "R,C")]
    pub tamper: Option<String>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, allow_hyphen_values = true)]
    pub du: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dv: Option<String>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// `exp1`, `exp5`, `perturbed`, `radial` or a trajectory CSV file.
    #[arg(long)]
    pub path: String,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<String>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub big_c: Option<String>,
    #[arg(long = "K", allow_hyphen_values = true)]
    pub big_k: Option<String>,
    /// Perturbation amplitude of the `perturbed` path.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Initial vector; defaults to the path's natural start.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    /// Parameter where the sweep area is zero.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub anchor: f64,
}

#[derive(Debug, Args)]
pub struct SectionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub varpi: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta: f64,
}

/// Layers defaults, config file, environment and flags.
pub fn build_config(global: &GlobalArgs, points: Option<usize>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let mut file_seed = None;
    if let Some(path) = &global.config {
        file_seed = cfg.apply_file(path)?;
    }
    let env = std::env::var(config::SEED_ENV).ok();
    cfg.seed = config::resolve_seed(global.seed, file_seed, env.as_deref())?;
    for item in &global.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--tol expects NAME=VALUE, got `{item}`")))?;
        let value = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad tolerance value in `{item}`")))?;
        cfg.set_tol(name.trim(), value)?;
    }
    if let Some(out) = &global.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(f) = global.format {
        cfg.format = Some(f);
    }
    if let Some(n) = points {
        cfg.num_points = n;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Verify(a) => {
            let cfg = build_config(&cli.global, a.points)?;
            verify::cmd_verify(&cfg, a.tamper.as_deref())
        }
        Command::Eigen(a) => commands::cmd_eigen(&build_config(&cli.global, None)?, a),
        Command::Svd(a) => commands::cmd_svd(&build_config(&cli.global, None)?, a),
        Command::Simulate(a) => commands::cmd_path(&build_config(&cli.global, None)?, a, false),
        Command::Dissipation(a) => commands::cmd_path(&build_config(&cli.global, None)?, a, true),
        Command::Section(a) => commands::cmd_section(&build_config(&cli.global, a.points)?, a),
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
