use thiserror::Error;

/// Errors raised by the witness toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown witness '{0}'")]
    UnknownWitness(String),

    #[error("unknown decomposition '{0}'")]
    UnknownDecomposition(String),

    #[error("invalid pairing '{0}' for {1} qubits")]
    InvalidPairing(String, usize),

    #[error("unsupported qubit count {0}")]
    UnsupportedQubits(usize),

    #[error("Pauli term '{0}' cannot be covered by the candidate directions")]
    Uncoverable(String),

    #[error("decomposition is not verified (residual {0:e})")]
    UnverifiedDecomposition(f64),

    #[error("witness is never negative on this white-noise family (pure-state value {0})")]
    NoThreshold(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
}

impl Error {
    /// Stable machine-readable code for JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotHermitian(_) => "not-hermitian",
            Error::InvalidState(_) => "invalid-state",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::EmptyInput(_) => "empty-input",
            Error::UnknownWitness(_) => "unknown-witness",
            Error::UnknownDecomposition(_) => "unknown-decomposition",
            Error::InvalidPairing(..) => "invalid-pairing",
            Error::UnsupportedQubits(_) => "unsupported-qubits",
            Error::Uncoverable(_) => "uncoverable-term",
            Error::UnverifiedDecomposition(_) => "unverified-decomposition",
            Error::NoThreshold(_) => "no-threshold",
            Error::InvalidProbabilities(_) => "invalid-probabilities",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
