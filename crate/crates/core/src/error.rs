use std::io;

use thiserror::Error;

/// Errors raised by the solver, diagnostics and I/O layers.
#[derive(Debug, Error)]
pub enum MhdError {
    /// A parameter or configuration entry is invalid. `key` names the offending entry.
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    /// Numerical data violates a structural invariant (e.g. Hermitian symmetry).
    #[error("data corruption: {0}")]
    DataCorruption(String),

    /// An operation was called on input outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// The solution became non-finite or exceeded the gradient ceiling.
    #[error("blow-up at t = {t}: |grad u|_2 = {grad_u_norm}, |grad b|_2 = {grad_b_norm}")]
    BlowUp {
        t: f64,
        grad_u_norm: f64,
        grad_b_norm: f64,
    },

    /// Malformed snapshot or CSV file.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl MhdError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        MhdError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, MhdError::BlowUp { .. })
    }
}

pub type Result<T> = std::result::Result<T, MhdError>;
