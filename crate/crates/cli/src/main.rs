mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::run::{Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                CliError::Usage(_) => 2,
                CliError::SizeCap(_) => 3,
                CliError::Io(_) => 4,
            })
        }
    }
}
