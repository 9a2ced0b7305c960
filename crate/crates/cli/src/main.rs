use std::process::ExitCode;

use clap::Parser;
use rumorsim::Execution;
use rumorsim_cli::{run, Cli, CliError};

/// Caps the worker pool used by ensembles and sweeps.
fn thread_limit() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RUMORSIM_THREADS") else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            rumorsim::par::limit_threads(n);
            Ok(())
        }
        _ => Err(CliError::config(format!(
            "RUMORSIM_THREADS: expected a positive integer, got '{raw}'"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match thread_limit().and_then(|()| run(cli, Execution::Parallel)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rumorsim: {e}");
            e.into()
        }
    }
}
