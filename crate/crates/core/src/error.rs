use thiserror::Error;

/// Errors produced by the codec, solver, approximation and sampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("value {value} outside {expected}")]
    OutOfRange { value: f64, expected: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate distribution")]
    Degenerate,

    #[error("q = {q} not supported: {reason}")]
    Unsupported { q: f64, reason: &'static str },

    #[error("recursion depth limit {0} exceeded")]
    DepthExceeded(usize),

    #[error("malformed table: {0}")]
    Table(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
