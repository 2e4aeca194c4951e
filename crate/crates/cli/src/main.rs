//! `pointfield` — scenario runner for the coupled charge/field simulator.
//!
//! Exit codes: 0 when a verdict was produced, 1 for configuration errors
//! (bad flags, unreadable or invalid scenario files), 2 for numerical
//! failures (integration breakdown, field reconstruction out of range,
//! failed verification checks).

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` on
// purpose: the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod artifacts;
mod commands;
mod scenario;

use anyhow::anyhow;
use artifacts::OutDir;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// A failed command, sorted by which exit code it deserves.
pub enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

#[derive(Parser)]
#[command(
    name = "pointfield",
    version,
    about = "Simulate a point charge coupled to its own scalar radiation field",
    after_help = "Artifacts land in --out-dir, else $POINTFIELD_OUT_DIR, else the \
                  current directory. Verdict lines go to stdout; timing and \
                  errors go to stderr."
)]
struct Cli {
    /// Directory for artifact files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file; write artifacts and print the verdict.
    ///
    /// The verdict is REST(theta), DECAYING(rate), LIGHTSPEED(t), or
    /// UNDECIDED(t_end) when the span ran out first. The lemma1 preset
    /// prints SENSITIVITY(Z, spread) instead.
    Run {
        /// Scenario JSON file (see the README for the schema).
        scenario: PathBuf,
    },
    /// Run the instability scenario across a ladder of pulse amplitudes.
    ///
    /// Writes sweep.csv with one row per amplitude: the exit angle when
    /// the charge leaves the radiation zone, the light-speed time, and
    /// their ratio to the amplitude. An amplitude of 0 runs the static
    /// problem and leaves those columns empty.
    Sweep {
        /// Comma-separated incoming-pulse amplitudes, e.g. 1e-2,1e-3,1e-4.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        /// Preset to sweep; only `instability` is available.
        #[arg(long, default_value = "instability")]
        preset: String,
        /// Coupling strength.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Bare mass (must be negative).
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        m: f64,
        /// Integration window end.
        #[arg(long, default_value_t = 60.0)]
        t_end: f64,
    },
    /// Run the built-in verification suite (one line per check).
    Verify,
    /// Sample the analytic field of a scenario on a grid at one time.
    FieldSnapshot {
        /// Scenario JSON file the field belongs to.
        #[arg(long)]
        scenario: PathBuf,
        /// Sample time.
        #[arg(long)]
        t: f64,
        /// Grid as lo:hi:n, e.g. -20:20:801 (default spans the light cone).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), Failure> {
    let err = || {
        Failure::Config(anyhow!(
            "--grid wants lo:hi:n with lo < hi and n >= 2, got `{text}`"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let lo: f64 = parts[0].parse().map_err(|_| err())?;
    let hi: f64 = parts[1].parse().map_err(|_| err())?;
    let n: usize = parts[2].parse().map_err(|_| err())?;
    if !(lo < hi) || n < 2 {
        return Err(err());
    }
    Ok((lo, hi, n))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let out = OutDir::resolve(cli.out_dir).map_err(Failure::Config)?;
    match cli.command {
        Command::Run { scenario } => commands::run(&scenario, &out),
        Command::Sweep {
            betas,
            preset,
            a,
            m,
            t_end,
        } => {
            if preset != "instability" {
                return Err(Failure::Config(anyhow!(
                    "only the instability preset sweeps; got `{preset}`"
                )));
            }
            commands::sweep(&commands::SweepConfig { betas, a, m, t_end }, &out)
        }
        Command::Verify => commands::verify_suite(),
        Command::FieldSnapshot { scenario, t, grid } => {
            let grid = grid.as_deref().map(parse_grid).transpose()?;
            commands::field_snapshot(&scenario, t, grid, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests print to stdout and succeed;
            // real usage errors are configuration errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let result = dispatch(cli);
    eprintln!("runtime: {:.3} s", started.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
    }
}
