//! Command-line harness for the `gdpm_core` solvers: load or generate a
//! quadratic, run one solver, or reproduce one of the benchmark experiments.
//!
//! Exit codes: 0 on normal termination, 2 when a run diverged, 3 on bad
//! input (unknown flags, malformed files, unsupported combinations).

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod experiments;
pub mod problem;
pub mod solve;

pub use args::{Alg, Cli, Command, ExperimentArgs, ExperimentName, GenArgs, SolveArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] gdpm_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(gdpm_core::Error::Diverged(_)) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first) and dispatches; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    3
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve::cmd_solve(a, out),
        Command::Experiment(a) => experiments::cmd_experiment(a, out),
        Command::Gen(a) => problem::cmd_gen(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
