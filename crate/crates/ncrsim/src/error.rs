//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    /// A numeric input that must be finite was NaN or infinite.
    #[error("non-finite value for {what}")]
    NonFinite { what: &'static str },

    /// A numeric input violated its documented range.
    #[error("{what}: {reason}")]
    OutOfRange { what: &'static str, reason: &'static str },

    /// Matrix/vector dimensions do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// An operation that needs a nonzero matrix got an (effectively) zero one.
    #[error("zero matrix passed to {context}")]
    ZeroMatrix { context: &'static str },

    /// Two positions that must differ coincide.
    #[error("coincident positions in {context}")]
    CoincidentPositions { context: &'static str },

    /// DFT codebooks exist only for perfect-square sizes.
    #[error("codebook size {m} is not a perfect square; use alternating optimization for arbitrary sizes")]
    NotPerfectSquare { m: usize },

    /// Closed-form expression left its valid domain.
    #[error("domain error: {reason}")]
    Domain { reason: String },

    /// Configuration text could not be parsed.
    #[error("config parse error on line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// Configuration contained a key this tool does not know.
    #[error("unknown config key: {key}")]
    UnknownKey { key: String },

    /// A config value failed validation; names the offending key.
    #[error("config value out of range for key \"{key}\": {reason}")]
    RangeViolation { key: String, reason: String },

    /// A required config key is missing.
    #[error("missing config key: {key}")]
    MissingKey { key: &'static str },

    #[error("empty input for {context}")]
    EmptyInput { context: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
