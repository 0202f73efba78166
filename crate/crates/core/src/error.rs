use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("empty qubit set")]
    EmptyQubitSet,
    #[error("matrix is not Hermitian (max |m - m^H| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid correlation spec: {0}")]
    InvalidCorrelation(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("nothing to emit: result grid is empty")]
    EmptyGrid,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
