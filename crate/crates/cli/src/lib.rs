//! The `projbound` command-line tool.
//!
//! Exit status: 0 when every check passes, 1 when an identity residual or a
//! bound leaves its tolerance, 2 for usage and input errors.

pub mod args;
mod commands;
pub mod error;
pub mod report;
pub mod svg;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
pub use commands::Outcome;
pub use error::{CliError, CliResult, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

/// Runs one command and returns its outcome without touching the exit status.
pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Reproduce(a) => commands::reproduce(a),
        Command::Bench(a) => commands::bench(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            if outcome.failures == 0 {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
