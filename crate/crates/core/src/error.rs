use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} is not supported for ReLU order s = 0")]
    ZeroOrder { what: &'static str },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("non-finite objective at step {step} of restart {restart}")]
    NonFinite { restart: usize, step: usize },

    #[error("exponent query out of range: {0}")]
    Range(String),

    #[error("not enough usable points for a fit: {usable} (need at least 3)")]
    TooFewPoints { usable: usize },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
