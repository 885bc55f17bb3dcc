//! Command-line front end: fitting, simulation, Monte Carlo tables and diagnostics.

mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

/// Failure classes mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Library(#[from] qmele::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Library(e) => {
                use qmele::Error as E;
                match e {
                    E::Domain(_) | E::UnsupportedOrder(_) => 2,
                    E::InsufficientData { .. } | E::DegenerateSample(_) => 3,
                    E::NumericOverflow { .. } | E::SingularInformation { .. } | E::NonConvergence(_) => 4,
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = commands::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmele: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
