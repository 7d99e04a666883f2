//! Batch front end for the pulse-shaping library.
//!
//! Four experiment families, one JSON config file each:
//!
//! ```text
//! photon-shaper pulse   --config run.json [--out DIR]
//! photon-shaper cavity  --config run.json [--out DIR]
//! photon-shaper fm      --config run.json [--method single_sideband|two_sideband|oracle]
//! photon-shaper code    --config run.json [--method encode|decode|roundtrip|crosstalk]
//! photon-shaper <any>   ... --sweep cavity.gamma=0.5:2.0:4
//! ```
//!
//! Exit codes: 0 success, 2 config or validation error, 3 numerical failure.

mod commands;
mod config;
mod output;
mod sweep;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "photon-shaper", version, about = "Shape and analyze single-photon pulses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a pulse and emit its time profile and spectrum.
    Pulse(JobArgs),
    /// Reflect a pulse off the cavity; emit profiles, spectra and stats.
    Cavity(JobArgs),
    /// Modulate the cavity while the pulse reflects; emit the output
    /// spectrum and sideband masses.
    Fm(JobArgs),
    /// Encode, decode, round-trip or cross-talk a pulse codebook.
    Code(JobArgs),
}

#[derive(Args, Clone)]
struct JobArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's output.path, then ".".
    #[arg(long)]
    out: Option<PathBuf>,
    /// Method or action override; wins over the config.
    #[arg(long)]
    method: Option<String>,
    /// Run many jobs over one parameter: path=start:stop:count.
    #[arg(long)]
    sweep: Option<String>,
}

/// Error carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<photon_shaper_core::Error> for CliError {
    fn from(e: photon_shaper_core::Error) -> Self {
        match e {
            photon_shaper_core::Error::IntegrationFailure { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Pulse(a) => (commands::Kind::Pulse, a),
        Command::Cavity(a) => (commands::Kind::Cavity, a),
        Command::Fm(a) => (commands::Kind::Fm, a),
        Command::Code(a) => (commands::Kind::Code, a),
    };
    let outcome = match &args.sweep {
        Some(spec) => sweep::run(kind, &args, spec),
        None => commands::run_single(kind, &args),
    };
    match outcome {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
