//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by validation, sampling, analysis, and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate, probability, or other real-valued input left its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or analysis parameters are inconsistent or out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vertex id, dimension index, or set referred to something absent.
    #[error("invalid reference: {0}")]
    InvalidReference(String),

    /// The strip decomposition degenerates for the requested `(n, gamma)`.
    #[error("degenerate strips: {0}")]
    DegenerateStrips(String),

    /// An enumeration or iteration exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A graph or config file failed to parse or violated its format contract.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn reference(msg: impl Into<String>) -> Self {
        Error::InvalidReference(msg.into())
    }

    pub(crate) fn format(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
