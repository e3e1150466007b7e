use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("party index {index} out of range for a {num_parties}-party register")]
    PartyOutOfRange { index: usize, num_parties: usize },

    #[error("cannot trace out every party of the register")]
    TraceAll,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    Trace(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("probabilities are invalid: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
