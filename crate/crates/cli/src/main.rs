//! `eteleport`: command-line front end for the teleportation simulator.
//!
//! Exit codes: 0 on success, 1 when `verify` reports a failing criterion,
//! 2 on invalid arguments, inputs or I/O errors.

mod commands;
mod grid;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use eteleport::Execution;

use crate::grid::parse_grid;
use crate::report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "eteleport", version, about = "Simulate dual-rail single-electron teleportation")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run every loop on the current thread.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outcome probabilities, Bob's states and efficiencies of the ideal protocol.
    Ideal {
        /// Reflection probability of the input state, in [0, 1].
        #[arg(long = "R", default_value_t = 0.5)]
        reflection: f64,
        /// Relative phase of the input state.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
    },
    /// Average fidelity under Gaussian phase noise.
    Saw {
        /// Total phase variance: `start:stop:step`, a comma list or one value.
        #[arg(long, default_value = "0:4:0.5")]
        sigma2: String,
        /// Random input states per grid point.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "ETELEPORT_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Average fidelity of the leviton architecture against temperature.
    Leviton {
        /// Pulse widths in units of the drive period.
        #[arg(long, default_value = "0.02,0.05,0.1")]
        gamma: String,
        /// Reduced temperatures.
        #[arg(long, default_value = "0:2:0.05")]
        tau: String,
    },
    /// Zero-temperature current correlators against their closed forms.
    Correlators {
        #[arg(long = "R", default_value_t = 0.5)]
        reflection: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
    },
    /// Parse a circuit file and report the unitarity of the composed network.
    CircuitCheck { path: PathBuf },
    /// Run the end-to-end verification criteria.
    Verify,
}

fn emit(report: &Report, cli: &Cli) -> Result<()> {
    let text = report.render(cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let exec = if cli.serial { Execution::Serial } else { Execution::Parallel };
    let report = match &cli.command {
        Command::Ideal { reflection, phi } => commands::ideal(*reflection, *phi)?,
        Command::Saw { sigma2, samples, seed } => {
            commands::saw(&parse_grid(sigma2).context("--sigma2")?, *samples, *seed, exec)?
        }
        Command::Leviton { gamma, tau } => {
            commands::leviton(&parse_grid(gamma).context("--gamma")?, &parse_grid(tau).context("--tau")?, exec)?
        }
        Command::Correlators { reflection, phi } => commands::correlators(*reflection, *phi)?,
        Command::CircuitCheck { path } => commands::circuit_check(path)?,
        Command::Verify => {
            let (report, passed) = commands::verify(exec);
            emit(&report, cli)?;
            return Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    emit(&report, cli)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
