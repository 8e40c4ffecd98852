//! `dvc`: task specs, corpus annotation and profiling, aligned retrieval,
//! co-training batches, and procedural generation from the command line.

mod args;
mod commands;
mod failure;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use failure::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) | Err(Failure::BrokenPipe) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Domain { kind, message }) => {
            eprintln!("error[{kind}]: {message}");
            ExitCode::from(1)
        }
    }
}
