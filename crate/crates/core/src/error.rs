use thiserror::Error;

pub type Result<T> = std::result::Result<T, AlError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability matrix: {0}")]
    InvalidProbabilities(String),

    #[error("estimator is not fitted")]
    NotFitted,

    #[error("estimator `{estimator}` does not support {capability}")]
    MissingCapability {
        estimator: &'static str,
        capability: &'static str,
    },

    #[error("requested {requested} instances but only {available} are selectable")]
    SelectionOutOfRange { requested: usize, available: usize },

    #[error("target kind mismatch: expected {expected}, got {found}")]
    TargetKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("class {0} has no training instances")]
    EmptyClass(usize),

    #[error("label column {0} is constant; both positive and negative examples are required")]
    ConstantLabel(usize),

    #[error("training diverged (non-finite weights)")]
    Diverged,

    #[error("kernel matrix is not positive definite even with jitter {0:e}")]
    Factorization(f64),

    #[error("committee needs at least 2 members, got {0}")]
    CommitteeSize(usize),
}
