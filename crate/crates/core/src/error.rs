use thiserror::Error;

/// Errors raised by the simulation library and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("bad subsystem index set: {0}")]
    BadIndexSet(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("measurement operators are not complete (deviation {0:.3e})")]
    IncompleteMeasurement(f64),

    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    /// A parameter exceeded a desk-scale resource guard.
    #[error("resource guard: {0}")]
    Guard(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
