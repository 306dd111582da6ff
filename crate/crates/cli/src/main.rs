//! `snf`: pattern grids, lobe tables, single-instance beamforming and
//! Monte-Carlo scenario curves, each written as CSV plus a JSON sidecar.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use sparse_nearfield::Error;

use args::Cli;

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// A solver stopped at its iteration cap and `--strict` was given.
    NotConverged,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("error: solver did not converge (--strict)");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
