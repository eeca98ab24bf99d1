use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MagicError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} requires n <= {cap}, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("tolerance error: {0}")]
    Tolerance(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid Pauli label character {0:?}")]
    InvalidPauliChar(char),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, MagicError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(MagicError::Dimension { expected, got })
    }
}

pub(crate) fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n <= cap {
        Ok(())
    } else {
        Err(MagicError::CapExceeded { what, n, cap })
    }
}
