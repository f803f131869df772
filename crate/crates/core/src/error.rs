use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid local dimensions ({0}, {1}): both must be at least 2")]
    InvalidDims(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("zero vector has no Schmidt decomposition")]
    ZeroVector,

    #[error("input vectors are linearly dependent (rank {rank} of {count})")]
    DependentVectors { rank: usize, count: usize },

    #[error("subspace dimension {requested} exceeds the CES bound {bound}")]
    CesDimensionBound { requested: usize, bound: usize },

    #[error("no completely entangled subspace found after {0} draws")]
    BudgetExhausted(usize),

    #[error("witness carries no decomposable provenance with a = 0")]
    MissingProvenance,

    #[error("operator is not an entanglement witness")]
    NotWitness,

    #[error("unknown example id {0:?}")]
    UnknownExample(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
