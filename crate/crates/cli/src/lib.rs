//! Front end for the `infosearch` library: configuration files, the
//! `capacity`, `plan`, `simulate` and `verify` commands, and CSV output.

pub mod commands;
pub mod config;
pub mod format;

use infosearch::error::SearchError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Convergence(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::ConvergenceFailure {
                best: Some(ref best),
                ..
            } => CliError::Convergence(format!(
                "{e}; best iterate u = {:?}, value {} bits, gap {}",
                best.optimum.as_slice(),
                format::sig9(best.value),
                format::sig9(best.gap)
            )),
            SearchError::ConvergenceFailure { .. } => CliError::Convergence(e.to_string()),
            SearchError::InvalidArgument(_) | SearchError::Unsupported(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}
