mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{CliError, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::ValidationFailed) => ExitCode::from(3),
        Ok(Status::Rejected) => ExitCode::from(4),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
