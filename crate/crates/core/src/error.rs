//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by matrix operations, encodings, builders and solvers.
#[derive(Debug, Clone, Error)]
pub enum CnmfError {
    /// Operand shapes are incompatible or a buffer length does not match.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An index lies outside the valid range.
    #[error("index out of bounds: {0}")]
    Bounds(String),

    /// A value violates a domain precondition (negative factor entry, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance is too large for the requested solver.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A configuration value is invalid.
    #[error("invalid config: {0}")]
    Config(String),

    /// Text input (CSV, coefficient list) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CnmfError>;
