//! Command-line front end: run single cycles, temperature sweeps,
//! adiabaticity and efficiency curves, the temperature-gap search, and the
//! randomized verification suites, emitting CSV or JSON with the resolved
//! configuration embedded.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{ConfigFile, FlagOverrides, GridSpec, OutputFormat};
use xyotto::dynamics::ScheduleKind;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn config(message: String) -> Self {
        CliError::Config(message)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

/// Quantum Otto cycle studies for a two-qubit XY working substance.
#[derive(Parser, Debug)]
#[command(name = "xyotto", version, about)]
struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// One of: cycle, sweep, adiabaticity, efficiency, gap, verify.
    #[arg(long)]
    command: Option<String>,

    /// Coupling strength along x.
    #[arg(long)]
    jx: Option<f64>,

    /// Coupling strength along y.
    #[arg(long)]
    jy: Option<f64>,

    /// High field endpoint.
    #[arg(long)]
    h1: Option<f64>,

    /// Low field endpoint.
    #[arg(long)]
    h2: Option<f64>,

    /// Temperature of bath 1.
    #[arg(long)]
    t1: Option<f64>,

    /// Temperature of bath 2.
    #[arg(long)]
    t2: Option<f64>,

    /// Stroke duration (selects the schedule-driven path).
    #[arg(long)]
    tau: Option<f64>,

    /// Explicit adiabaticity; comma-separated list where a scan is meant.
    #[arg(long)]
    p: Option<String>,

    /// Drive shape: sqrt-linear, linear-h or linear-h2.
    #[arg(long)]
    schedule: Option<String>,

    /// T1 axis as MIN:MAX:COUNT[:log].
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    grid_t1: Option<String>,

    /// T2 axis as MIN:MAX:COUNT[:log].
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    grid_t2: Option<String>,

    /// Stroke-duration axis as MIN:MAX:COUNT[:log].
    #[arg(long, value_name = "MIN:MAX:COUNT[:log]")]
    grid_tau: Option<String>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,

    /// Seed for the randomized verification suites.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_p_list(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad `p` value `{piece}`")))
        })
        .collect()
}

fn collect_flags(cli: &Cli) -> Result<FlagOverrides, CliError> {
    let parse_grid = |raw: &Option<String>, name: &str| -> Result<Option<GridSpec>, CliError> {
        raw.as_deref()
            .map(|s| {
                s.parse::<GridSpec>()
                    .map_err(|e| CliError::config(format!("{name}: {e}")))
            })
            .transpose()
    };
    Ok(FlagOverrides {
        command: cli.command.clone(),
        jx: cli.jx,
        jy: cli.jy,
        h1: cli.h1,
        h2: cli.h2,
        t1: cli.t1,
        t2: cli.t2,
        tau: cli.tau,
        p: cli.p.as_deref().map(parse_p_list).transpose()?,
        schedule: cli
            .schedule
            .as_deref()
            .map(|s| s.parse::<ScheduleKind>().map_err(CliError::config))
            .transpose()?,
        grid_t1: parse_grid(&cli.grid_t1, "grid-t1")?,
        grid_t2: parse_grid(&cli.grid_t2, "grid-t2")?,
        grid_tau: parse_grid(&cli.grid_tau, "grid-tau")?,
        out: cli.out.clone(),
        format: cli
            .format
            .as_deref()
            .map(|s| s.parse::<OutputFormat>().map_err(CliError::config))
            .transpose()?,
        seed: cli.seed,
    })
}

fn try_main() -> Result<run::RunStatus, CliError> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let flags = collect_flags(&cli)?;
    let resolved = config::resolve(file, flags)?;
    let start = Instant::now();
    let status = run::execute(&resolved)?;
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(status)
}

fn main() -> ExitCode {
    match try_main() {
        Ok(run::RunStatus::Success) => ExitCode::SUCCESS,
        Ok(run::RunStatus::VerifyFailed) => ExitCode::from(4),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
