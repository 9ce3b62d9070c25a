use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dataset is empty or too small: {0}")]
    EmptyData(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("grid is not strictly increasing at index {index}")]
    NonMonotoneGrid { index: usize },

    #[error("cluster {cluster} of {k} is empty")]
    EmptyCluster { cluster: usize, k: usize },

    #[error("label {label} at position {index} is outside 0..{k}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        k: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch: expected {expected} grid points, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("partition covers {got} observations, dataset has {expected}")]
    PartitionMismatch { expected: usize, got: usize },

    #[error("sparsity parameter {m} out of range (must satisfy {range})")]
    SparsityOutOfRange { m: f64, range: String },

    #[error("l1 bound s = {s} out of range [1, {max}]")]
    SOutOfRange { s: f64, max: f64 },

    #[error("negative dispersion value at index {index}")]
    NegativeDispersion { index: usize },

    #[error("no strictly positive dispersion entries")]
    NonPositiveDispersion,

    #[error("soft thresholding left no positive entry")]
    AllZeroAfterThreshold,

    #[error("dispersion vanishes on the retained set")]
    DegenerateDispersion,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("K = {k} is invalid for {n} observations")]
    KTooLarge { k: usize, n: usize },

    #[error("objective is not positive for every candidate sparsity value")]
    DegenerateObjective,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures caused by bad input (as opposed to numerical breakdown).
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonPositiveDispersion
                | Error::AllZeroAfterThreshold
                | Error::DegenerateDispersion
                | Error::DegenerateObjective
        )
    }
}
