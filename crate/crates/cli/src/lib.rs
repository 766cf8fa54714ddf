//! `fracmom` command-line tool.
//!
//! Exit codes: 0 success, 1 failed validation row, 2 domain or existence
//! error, 3 numerical non-convergence, 64 usage error.

pub mod config;
pub mod model;
pub mod regress;
pub mod suite;
pub mod sweep;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::model::ModelArgs;
use crate::regress::NoiseKind;
use crate::suite::SuiteOptions;
use crate::table::{Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(fracmom::Error),
    Validation(usize),
}

impl From<fracmom::Error> for CliError {
    fn from(e: fracmom::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Validation(n) => write!(f, "{n} validation row(s) failed"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use fracmom::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Lib(
                E::NonConvergence { .. } | E::InvalidIntegrand(_) | E::TailFit { .. } | E::Normalization(_),
            ) => EXIT_NONCONVERGENCE,
            CliError::Lib(_) => EXIT_DOMAIN,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracmom", version, about = "Fractional absolute moments of heavy-tailed laws")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// key = value configuration file (default: $FRACMOM_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout by default).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_segments: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// E|X - mu|^(1 + lambda) for one distribution.
    #[command(allow_negative_numbers = true)]
    Moment(ModelArgs),
    /// Prediction error E|error|^(1 + lambda) of an application model.
    #[command(allow_negative_numbers = true)]
    Predict(ModelArgs),
    /// Moments or prediction errors over a grid.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Least-squares estimation errors for a design column `x`.
    #[command(allow_negative_numbers = true)]
    Regress(RegressArgs),
    /// Closed forms against independent oracles.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Built-in grid; `figure1` writes figure1_mu.csv and figure1_beta.csv.
    #[arg(long)]
    pub preset: Option<String>,
    /// Directory for preset output.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// `name=lo:hi:step`, `name=v1,v2` or `name=v`; name in mu, beta, lambda, c, t.
    #[arg(long)]
    pub grid: Vec<String>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct RegressArgs {
    /// CSV file with a header and a numeric column `x`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "iid")]
    pub noise: NoiseKind,
    #[arg(long)]
    pub alpha: f64,
    /// Linnik shape.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Only this group: stable, geometric-stable, linnik, pareto, cp or applications.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = suite::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    /// Skip the Monte Carlo rows.
    #[arg(long)]
    pub no_mc: bool,
}

impl GlobalArgs {
    /// Configuration file values overridden by flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(o) = &self.output {
            cfg.output_path = Some(o.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(v) = self.rel_tol {
            cfg.quadrature.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.quadrature.abs_tol = v;
        }
        if let Some(v) = self.max_segments {
            cfg.quadrature.max_segments = v;
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn emit(t: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    t.emit(cfg.format, cfg.output_path.as_deref())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.global.resolve()?;
    let q = &cfg.quadrature;
    match cli.command {
        Command::Moment(m) => emit(&model::moment_table(&m.moment(q)?), &cfg),
        Command::Predict(m) => emit(&model::prediction_table(&m.predict()?), &cfg),
        Command::Sweep(s) => match s.preset.as_deref() {
            Some("figure1") => {
                if !s.grid.is_empty() {
                    return Err(CliError::Usage("--preset and --grid are exclusive".into()));
                }
                let (by_mu, by_beta) = sweep::figure1(q)?;
                std::fs::create_dir_all(&s.out_dir).map_err(|e| {
                    CliError::Usage(format!("cannot create {}: {e}", s.out_dir.display()))
                })?;
                let ext = match cfg.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                by_mu.emit(cfg.format, Some(&s.out_dir.join(format!("figure1_mu.{ext}"))))?;
                by_beta.emit(cfg.format, Some(&s.out_dir.join(format!("figure1_beta.{ext}"))))
            }
            Some(other) => Err(CliError::Usage(format!("unknown preset '{other}'"))),
            None => {
                let axes = s.grid.iter().map(|g| sweep::Axis::parse(g)).collect::<Result<Vec<_>, _>>()?;
                emit(&sweep::sweep(&s.model, &axes, q)?, &cfg)
            }
        },
        Command::Regress(r) => {
            let x = regress::read_x(&r.input)?;
            emit(&regress::regress(x, r.noise, r.alpha, r.beta, r.lambda)?, &cfg)
        }
        Command::Validate(v) => {
            if let Some(g) = &v.only {
                if !suite::GROUPS.contains(&g.as_str()) {
                    return Err(CliError::Usage(format!(
                        "unknown group '{g}'; choose from {}",
                        suite::GROUPS.join(", ")
                    )));
                }
            }
            let opts = SuiteOptions { seed: cfg.seed, mc_samples: v.mc_samples, monte_carlo: !v.no_mc, only: v.only };
            let rows = suite::run_suite(&opts, q);
            emit(&suite::report_table(&rows), &cfg)?;
            match rows.iter().filter(|r| !r.passed).count() {
                0 => Ok(()),
                n => Err(CliError::Validation(n)),
            }
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("fracmom: {e}");
            e.exit_code()
        }
    }
}
