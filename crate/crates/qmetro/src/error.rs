use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (max elementwise deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("Kraus set is not trace preserving (max elementwise deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
