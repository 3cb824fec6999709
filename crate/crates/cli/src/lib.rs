//! Command-line front end: manifests in, JSON reports and CSV sidecars out.
//!
//! Exit codes: 0 success or verified solution, 1 verified non-solution,
//! 2 evaluation-domain error, 3 input, parse or constraint error.

pub mod args;
mod commands;
pub mod manifest;
mod output;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

pub use commands::execute;
pub use manifest::RunManifest;
pub use output::{to_sorted_json, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

/// Parses `argv`, runs the command and writes its outputs. Returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, a) = cli.command.parts();
    let run = RunManifest::from_args(name, a).and_then(|m| {
        let outcome = execute(&m)?;
        outcome.write(&m)?;
        Ok(outcome)
    });
    match run {
        Ok(o) => {
            if let Some(msg) = &o.message {
                eprintln!("{msg}");
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
