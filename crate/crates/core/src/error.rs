use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("branch cut: {0}")]
    Branch(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("element not in space: {0}")]
    NotInSpace(String),

    #[error("accuracy target missed: {0}")]
    Accuracy(String),

    #[error("ill-conditioned Gram matrix (condition number {0:.3e})")]
    Conditioning(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
