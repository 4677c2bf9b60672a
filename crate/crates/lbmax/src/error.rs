use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver did not converge (max scaled residual {max_residual:.3e} after {iterations} iterations)")]
    NoConvergence { max_residual: f64, iterations: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("degenerate triangle at index {0}")]
    DegenerateTriangle(usize),
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("iteration cap exceeded: {0}")]
    IterationCap(String),
    #[error("enumeration radius {radius} is insufficient for k = {k}")]
    RadiusInsufficient { radius: i64, k: usize },
    #[error("no bracket found: {0}")]
    NoBracket(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical method, false for bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotPositiveDefinite
                | Error::IterationCap(_)
                | Error::NoBracket(_)
                | Error::DegenerateTriangle(_)
                | Error::NonManifold(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
