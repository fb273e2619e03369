use thiserror::Error;

use crate::channel::CapacityResult;

/// Errors raised by the search library.
#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative solver stopped before meeting its tolerance. `best`
    /// carries the last iterate when one exists.
    #[error("convergence failure: {message}")]
    ConvergenceFailure {
        message: String,
        best: Option<Box<CapacityResult>>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl SearchError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SearchError::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SearchError>;
