use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid theory: {0}")]
    InvalidTheory(String),

    #[error("feature index {0} is out of range")]
    UnknownFeature(usize),

    #[error("unknown feature `{0}`")]
    UnknownFeatureName(String),

    #[error("value index {value} is outside the domain of feature `{feature}`")]
    UnknownValue { feature: String, value: u32 },

    #[error("value `{value}` is not in the domain of feature `{feature}`")]
    UnknownValueName { feature: String, value: String },

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("inconsistent literals on feature `{0}`")]
    Inconsistent(String),

    #[error("arity mismatch: expected {expected} features, got {got}")]
    TheoryMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity { what: &'static str, needed: String, cap: u64 },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("contradictory labels for instance {instance}: `{first}` and `{second}`")]
    ContradictoryLabels { instance: String, first: String, second: String },

    #[error("target {0} is not a member of the dataset")]
    NotInDataset(String),

    #[error("classifier is undefined on {0}")]
    Undefined(String),

    #[error("precondition violated: {0}")]
    Contract(String),

    #[error("target selector: {0}")]
    Selector(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Capacity errors are distinguished from ordinary input errors by callers.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
