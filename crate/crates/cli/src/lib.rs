//! Command-line front end: field scans, trajectory batches, diagnostics and
//! classical runs written as CSV or JSON.
//!
//! Exit codes: 0 on success, 1 for configuration or I/O errors, 2 when a run
//! aborts on a numerical degeneracy.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{cmd_classical, cmd_diagnose, cmd_scan, cmd_trace, Outcome};
pub use config::{Format, Overrides, Preset, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] kgpilot::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("run aborted: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kgpilot",
    version,
    about = "Klein-Gordon pilot-wave scans, trajectories and diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field, phase gradients and velocities across the box at fixed t.
    #[command(allow_negative_numbers = true)]
    Scan(Overrides),
    /// Integrate flow lines from a list of initial conditions.
    #[command(allow_negative_numbers = true)]
    Trace(Overrides),
    /// Roots, pathology intervals, eigen degeneracies and current flux.
    #[command(allow_negative_numbers = true)]
    Diagnose(Overrides),
    /// Point particle in an external field.
    #[command(allow_negative_numbers = true)]
    Classical(Overrides),
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Scan(o) => cmd_scan(&RunConfig::resolve(o)?),
        Command::Trace(o) => cmd_trace(&RunConfig::resolve(o)?),
        Command::Diagnose(o) => cmd_diagnose(&RunConfig::resolve(o)?),
        Command::Classical(o) => cmd_classical(&RunConfig::resolve(o)?),
    }
}
