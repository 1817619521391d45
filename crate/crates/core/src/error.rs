use thiserror::Error;

/// Errors raised by state construction, entropic functionals and checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state vector is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidProbabilities(String),

    #[error("entropic parameter must be positive and finite (got {0})")]
    InvalidParameter(f64),

    #[error("argument must be positive (got {0})")]
    NonPositiveArgument(f64),

    #[error("operation requires q >= 1 (got {0})")]
    ParameterBelowOne(f64),

    #[error("operation requires q > 1 (got {0})")]
    ParameterNotAboveOne(f64),

    #[error("operation is only defined at q = 1 (got {0})")]
    ParameterNotOne(f64),

    #[error("parameter {value} outside {range}")]
    ParameterOutOfRange { value: f64, range: &'static str },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("supports are not mutually orthogonal (overlap {0:e})")]
    SupportsNotOrthogonal(f64),

    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("matrix is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("decomposition cardinality {m} is below the rank {rank}")]
    CardinalityBelowRank { m: usize, rank: usize },

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("subsystem must be a qubit (dimension {0})")]
    NotQubit(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("malformed state record: {0}")]
    Record(String),
}

pub type Result<T> = std::result::Result<T, Error>;
