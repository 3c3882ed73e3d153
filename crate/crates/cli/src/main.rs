//! `tight-storage`: one binary with subcommands for building, solving and
//! certifying storage models and running the case studies.
//!
//! Exit codes: 0 success, 1 infeasible model or false certificate, 2 bad
//! input, 3 resource limit.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};

/// Failures that end a command with exit code 2 or 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("resource limit: {0}")]
    Limit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Limit(_) => 3,
        }
    }
}

/// Whether a command that ran to completion reports success.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Success,
    /// Infeasible model, false certificate or violated ordering.
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => commands::build(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Replay(a) => commands::replay(&a),
        Command::Case(a) => commands::case(&a),
        Command::Flex(a) => commands::flex(&a),
    };
    match result {
        Ok(Verdict::Success) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
