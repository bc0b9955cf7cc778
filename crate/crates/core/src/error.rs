use thiserror::Error;

use crate::series::Truncation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: Truncation, right: Truncation },

    #[error("series is not invertible ({reason}): {series}")]
    NonInvertible { series: String, reason: String },

    #[error("substitution loses information beyond the truncation: {0}")]
    TruncationOverflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at factor {factor}")]
    Pole { factor: String },

    #[error("family `{family}` declares no support bound")]
    MissingSupportBound { family: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("invalid argument: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
