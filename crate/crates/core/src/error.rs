use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("wrong number of flags: expected {expected}, got {actual}")]
    WrongArity { expected: usize, actual: usize },

    #[error("degenerate flag: {0}")]
    DegenerateFlag(String),

    #[error("invalid decoration at step {step}")]
    InvalidDecoration { step: usize },

    #[error("ill-conditioned configuration: singular value ratio {ratio:e}")]
    IllConditioned { ratio: f64 },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("both homogeneous coordinates vanish")]
    ZeroPoint,

    #[error("coincident points")]
    CoincidentPoints,

    #[error("configuration is not maximal: defect {defect:e} exceeds tolerance {tol:e}")]
    NotMaximal { defect: f64, tol: f64 },

    #[error("degenerate intersection at level {level}")]
    DegenerateIntersection { level: usize },

    #[error("verification failed: flag {index} is at distance {distance:e} (threshold {threshold:e})")]
    VerificationFailed {
        index: usize,
        distance: f64,
        threshold: f64,
    },

    #[error("partition {parts:?} does not sum to {n}")]
    InvalidPartition { n: usize, parts: Vec<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::WrongArity { .. } => "wrong_arity",
            Error::DegenerateFlag(_) => "degenerate_flag",
            Error::InvalidDecoration { .. } => "invalid_decoration",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::SingularMatrix => "singular_matrix",
            Error::ZeroPoint => "zero_point",
            Error::CoincidentPoints => "coincident_points",
            Error::NotMaximal { .. } => "not_maximal",
            Error::DegenerateIntersection { .. } => "degenerate_intersection",
            Error::VerificationFailed { .. } => "verification_failed",
            Error::InvalidPartition { .. } => "invalid_partition",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
