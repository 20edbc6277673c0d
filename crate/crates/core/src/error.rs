use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FenceError {
    #[error("invalid fence shape {shape:?}: {reason}")]
    ShapeInvalid { shape: Vec<usize>, reason: String },

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("element {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("fence has {n} elements; at most {limit} are supported")]
    TooLarge { n: usize, limit: usize },

    #[error("{0} is not an order ideal of the fence")]
    NotAnIdeal(String),

    #[error("{0} is not an antichain of the fence")]
    NotAntichain(String),

    #[error("the empty antichain has no well-defined toggleability statistic")]
    EmptyAntichain,

    #[error("certificate mismatch for {label} on ideal {ideal}")]
    CertificateMismatch { label: String, ideal: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("check failed: {0}")]
    AssertionFailure(String),

    #[error("fence {0} has no order-reversing index involution")]
    NotSelfDual(String),

    #[error("birational statistics need integer exponents, got {0}")]
    NonIntegerExponent(String),

    #[error("exact iteration capped at {limit} steps, {requested} requested")]
    StepLimit { limit: usize, requested: usize },
}

pub type Result<T, E = FenceError> = std::result::Result<T, E>;
