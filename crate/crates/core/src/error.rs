use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("dense capacity exceeded: {what} needs dimension {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: String,
        limit: usize,
    },

    #[error("eigensolver did not converge on a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension d={d} for {kind}; supported: {supported}")]
    UnsupportedDimension {
        kind: &'static str,
        d: usize,
        supported: &'static str,
    },

    #[error("invalid measurement set: {0}")]
    InvalidMeasurement(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("violation gap changes sign {crossings} times on [0, 1]; sign changes near p = {locations:?}")]
    MultipleCrossings { crossings: usize, locations: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
