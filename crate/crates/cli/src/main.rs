mod cli;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use jsa_forge::{Error, Result};

use cli::{Cli, Command};
use config::RunConfig;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// JSA_FORGE_THREADS, if set to a positive integer.
fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("JSA_FORGE_THREADS") {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Domain(format!(
                "JSA_FORGE_THREADS must be a positive integer (got {v:?})"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Domain(format!("JSA_FORGE_THREADS: {e}"))),
    }
}

#[cfg(feature = "parallel")]
fn limit_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn limit_threads(_n: usize) -> Result<()> {
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = thread_cap()? {
        limit_threads(n)?;
    }
    let mut cfg = RunConfig::new(&cli.command, cli.verbose)?;
    match &cli.command {
        Command::Jsa(a) => commands::jsa(a, &mut cfg, false),
        Command::FcConvert(a) => commands::jsa(a, &mut cfg, true),
        Command::Purity(a) => commands::purity(a, &mut cfg),
        Command::MapCheck(a) => commands::map_check(a, &mut cfg),
        Command::Optimize(a) => commands::optimize(a, &mut cfg),
        Command::GvdSweep(a) => commands::gvd_sweep(a, &mut cfg),
        Command::GaussianPurity(a) => commands::gaussian(a, &mut cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on bad usage by itself.
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            })
        }
    }
}
