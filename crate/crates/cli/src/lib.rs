//! Command-line front end for `phasenoise-core`: bound tables, Monte-Carlo
//! estimates, pre-log curves and a self-check. Every command writes CSV
//! (or, for `verify`, a plain-text report) to a `Write` so it can be driven
//! from tests as well as from the binary.

pub mod commands;
pub mod settings;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use commands::{run_bounds, run_mc, run_moments, run_prelog, run_sweep};
pub use settings::{CommonArgs, Settings};
pub use verify::{run_verify, verify, VerifyOptions, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "phasenoise", version, about = "Wiener phase noise channel: bounds, Monte-Carlo estimates and pre-log curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form fading moments per operating point
    Moments(CommonArgs),
    /// Amplitude and phase lower bounds with all intermediates
    Bounds(CommonArgs),
    /// Monte-Carlo estimates next to the analytic values
    Mc(CommonArgs),
    /// Bounds and Monte-Carlo rates over the (gamma, snr, alpha) grid
    Sweep(CommonArgs),
    /// Pre-log lower bound and its amplitude / phase parts over an alpha grid
    Prelog(CommonArgs),
    /// Run the self-check suite; exit status 1 if any check fails
    Verify(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Moments(a)
            | Command::Bounds(a)
            | Command::Mc(a)
            | Command::Sweep(a)
            | Command::Prelog(a)
            | Command::Verify(a) => a,
        }
    }
}

/// Runs one command to `out`. Returns `false` only when `verify` finds a
/// failing check.
pub fn execute(command: &Command, settings: &Settings, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Moments(_) => run_moments(settings, out)?,
        Command::Bounds(_) => run_bounds(settings, out)?,
        Command::Mc(_) => run_mc(settings, out)?,
        Command::Sweep(_) => run_sweep(settings, out)?,
        Command::Prelog(_) => run_prelog(settings, out)?,
        Command::Verify(_) => return run_verify(settings, &VerifyOptions::default(), out),
    }
    Ok(true)
}

/// Resolves settings and runs the command, writing to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<bool> {
    let settings = Settings::resolve(cli.command.args())?;
    let ok = match &settings.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            let ok = execute(&cli.command, &settings, &mut w)?;
            w.flush()?;
            ok
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let ok = execute(&cli.command, &settings, &mut w)?;
            w.flush()?;
            ok
        }
    };
    Ok(ok)
}
