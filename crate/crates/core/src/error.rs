use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} amplitudes for {n} qubits, got {got}")]
    LengthMismatch { n: usize, expected: usize, got: usize },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("state norm {norm} deviates from 1 by more than {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("unsupported qubit count {got} (expected {expected})")]
    QubitCount { got: usize, expected: &'static str },

    #[error("invalid qubit selection: {0}")]
    InvalidQubits(String),

    #[error("matrix is not square with power-of-two dimension: {rows}x{cols}")]
    Dimension { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("trace {0} is not 1")]
    NotUnitTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("eigensolver failed to converge")]
    EigenSolver,

    #[error("tangle undefined: both sides of the partition have rank > 2")]
    TangleUndefined,

    #[error("tangle value {0} outside [0, 1]")]
    TangleOutOfRange(f64),

    #[error("invalid focus qubit {0}")]
    InvalidFocus(usize),

    #[error("mixing matrix is not an isometry (max deviation {0:e})")]
    NotIsometry(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown verification mode `{0}`")]
    UnknownMode(String),

    #[error("state file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
