//! `heatbounds`: bound tables, Monte Carlo runs, spectral scans and the
//! verification suite.
//!
//! Exit status: 0 on success, 1 when a bound is violated or the suite fails,
//! 2 on usage errors.

mod bounds;
mod config;
mod mc;
mod plot;
mod spectral;
mod verify;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};
use config::{merge, Format, UsageError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "heatbounds", version, about = "Gradient bounds for heat semigroups, checked against Monte Carlo and exact oracles")]
struct Cli {
    /// JSON file with the subcommand's parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV, JSON and SVG outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats written under --out.
    #[arg(long, global = true, value_delimiter = ',', value_enum)]
    format: Vec<Format>,
    #[command(subcommand)]
    command: Command,
}

// Parsed once per process; boxing buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum Command {
    /// Evaluate a bound over parameter grids.
    Bounds(bounds::BoundsArgs),
    /// Monte Carlo semigroup or gradient estimate.
    Mc(mc::McArgs),
    /// Band-projection sup norms and their scaling.
    Spectral(spectral::SpectralArgs),
    /// Run verification experiments.
    Verify(verify::VerifyArgs),
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("HEATBOUNDS_THREADS") else { return Ok(()) };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(UsageError(format!("HEATBOUNDS_THREADS must be a positive integer, got `{v}`")).into()),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker threads")
}

fn dispatch(cli: Cli) -> Result<i32> {
    init_threads()?;
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::Bounds(a) => {
            let (a, out, prov) = merge(a, cfg, cli.out.clone(), &cli.format)?;
            bounds::run(&a, &out, &prov)
        }
        Command::Mc(a) => {
            let (a, out, prov) = merge(a, cfg, cli.out.clone(), &cli.format)?;
            mc::run(&a, &out, &prov)
        }
        Command::Spectral(a) => {
            let (a, out, prov) = merge(a, cfg, cli.out.clone(), &cli.format)?;
            spectral::run(&a, &out, &prov)
        }
        Command::Verify(a) => {
            let (a, out, prov) = merge(a, cfg, cli.out.clone(), &cli.format)?;
            verify::run(&a, &out, &prov)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
