use thiserror::Error;

use crate::expr::ParseError;

/// Errors raised by the engine.
///
/// `Unknown` verdicts are not errors; they are carried inside [`crate::Verdict`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: String, detail: String },

    #[error("not representable: {0}")]
    NotRepresentable(String),

    #[error("not differentiable at {at}: {reason}")]
    NonDifferentiable { at: String, reason: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub fn domain(op: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Domain {
            op: op.into(),
            detail: detail.into(),
        }
    }

    pub fn not_representable(what: impl Into<String>) -> Self {
        Error::NotRepresentable(what.into())
    }

    pub fn usage(what: impl Into<String>) -> Self {
        Error::Usage(what.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
