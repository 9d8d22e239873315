use thiserror::Error;

/// Errors produced by the characterization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DcqdError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("map is not completely positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A reconstruction factor or design matrix is degenerate.
    #[error("ill-posed configuration: {0}")]
    IllPosed(String),

    #[error("ill-conditioned tomography plan: {0}")]
    IllConditionedPlan(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Decay so strong that the logarithm argument is not positive.
    #[error("saturated decay: {0}")]
    Saturation(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("numerical validation failed: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl DcqdError {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        DcqdError::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, DcqdError>;
