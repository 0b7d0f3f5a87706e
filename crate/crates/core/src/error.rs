use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("generator matrix is singular (|det V| = {det})")]
    SingularGenerators { det: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("compound order {order} outside 1..={max}")]
    InvalidOrder { order: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("delta {delta} outside (0, {max})")]
    DeltaOutOfRange { delta: f64, max: f64 },

    #[error("chain search truncated; best chain found has length {length}")]
    SearchTruncated { length: usize, chain: Vec<Vec<i64>> },

    #[error("matrix box (radius {matrix}, dim {matrix_dim}) does not match partition box (radius {partition}, dim {partition_dim})")]
    BoxMismatch {
        matrix: i64,
        matrix_dim: usize,
        partition: i64,
        partition_dim: usize,
    },

    #[error("entry ({j:?}, {j_prime:?}) lies inside a single cluster")]
    IntraClusterEntry { j: Vec<i64>, j_prime: Vec<i64> },

    #[error("determinant identity violated, residual {residual}")]
    IdentityViolation { residual: String },

    #[error("gamma {gamma} outside [0, {max}]")]
    GammaOutOfRange { gamma: f64, max: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
