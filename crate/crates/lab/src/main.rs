use std::process::ExitCode;

use clap::Parser;
use mdrk_lab::cli::{execute, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Diverged) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
