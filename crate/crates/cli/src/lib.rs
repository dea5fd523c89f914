//! Command-line front end: configuration loading, seeded runs and
//! plot-ready artifacts under `runs/<timestamp>-<seed>/`.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid configuration,
//! 3 no accepted post-selection shots, 4 spectrum profiling failed.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use affqetu_aff::ExecMode;
use affqetu_estimators::Method;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{
    apply_override, AffSection, BoundsSection, EstimateSection, ExecutionSection, ExperimentConfig, InitialState,
    Preparation, ProfileSection, StaticSection, TfimSection, TheorySection,
};
pub use output::{num, Csv, RunDir};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NoAcceptedShots(String),
    #[error("{0}")]
    ProfilingFailed(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NoAcceptedShots(_) => 3,
            CliError::ProfilingFailed(_) => 4,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Trotter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dem,
    Rpe,
    Qcels,
}

#[derive(Debug, Parser)]
#[command(name = "affqetu", version, about = "Adaptive QETU filtering, spectrum profiling and energy estimation")]
pub struct Cli {
    /// TOML experiment file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Root of the run directories; `AFFQETU_OUT` takes precedence.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Two-qubit depolarizing probability.
    #[arg(long, global = true)]
    pub p2: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact spectrum and gaps.
    Spectrum(Overrides),
    /// Adaptive filtering run.
    Aff(Overrides),
    /// Static repetitions of the first-stage filter.
    Static(Overrides),
    /// Spectral CDF of the initial state and extracted bounds.
    Profile(Overrides),
    /// Ground-state energy estimate.
    Estimate {
        #[arg(value_enum)]
        method: MethodArg,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Stretch scan and depth predictions.
    Theory(Overrides),
}

#[derive(Debug, clap::Args)]
pub struct Overrides {
    /// `section.key=value` settings applied on top of the config file.
    pub set: Vec<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Aff(_) => "aff",
            Command::Static(_) => "static",
            Command::Profile(_) => "profile",
            Command::Estimate { .. } => "estimate",
            Command::Theory(_) => "theory",
        }
    }

    fn overrides(&self) -> &[String] {
        match self {
            Command::Spectrum(o)
            | Command::Aff(o)
            | Command::Static(o)
            | Command::Profile(o)
            | Command::Theory(o)
            | Command::Estimate { overrides: o, .. } => &o.set,
        }
    }
}

/// Resolves the configuration from the file, overrides and flags.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::load(cli.config.as_deref(), cli.command.overrides())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(out) = std::env::var_os("AFFQETU_OUT") {
        config.out = PathBuf::from(out);
    }
    if let Some(mode) = cli.mode {
        config.execution.mode = match mode {
            ModeArg::Exact => ExecMode::Exact,
            ModeArg::Trotter => ExecMode::Trotter,
        };
    }
    if let Some(p2) = cli.p2 {
        config.execution.p2 = p2;
    }
    Ok(config)
}

/// Runs one command and returns its output directory.
pub fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let config = resolve_config(cli)?;
    let command = cli.command.name();
    let mut dir = RunDir::create(&config.out, command, config.seed)?;
    dir.write("config.toml", config.to_toml())?;
    let result = match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&config, &mut dir),
        Command::Aff(_) => commands::aff(&config, &mut dir),
        Command::Static(_) => commands::static_run(&config, &mut dir),
        Command::Profile(_) => commands::profile(&config, &mut dir),
        Command::Estimate { method, .. } => {
            let m = match method {
                MethodArg::Dem => Method::Dem,
                MethodArg::Rpe => Method::Rpe,
                MethodArg::Qcels => Method::Qcels,
            };
            commands::estimate(&config, m, &mut dir)
        }
        Command::Theory(_) => commands::theory(&config, &mut dir),
    };
    let path = dir.finish(&config, result.as_ref().err())?;
    result.map(|_| path)
}

/// Entry point behind the binary; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    match execute(cli) {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
