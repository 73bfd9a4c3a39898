//! Library side of the `ternlab` command-line tool: instance files, reports
//! and the command implementations.

pub mod commands;
pub mod instance_file;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input; exit code 2.
    #[error("input error: {0}")]
    Input(String),
    /// A computation could not establish the requested property; exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<ternlab::Error> for CliError {
    fn from(e: ternlab::Error) -> Self {
        use ternlab::Error as E;
        match e {
            E::InvalidInput(_) | E::Shape(_) | E::NormUnavailable => CliError::Input(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Settings shared by all commands.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self { seed: 0, samples: 500, tol: 1e-8 }
    }
}
