use thiserror::Error;

pub type Result<T> = std::result::Result<T, AfdmError>;

#[derive(Debug, Error)]
pub enum AfdmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frame length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("frame already carries a {0}-sample prefix")]
    PrefixPresent(usize),

    #[error("frame carries no prefix to strip")]
    PrefixMissing,

    #[error("delay of {needed} samples exceeds the {available}-sample prefix")]
    DelayExceedsPrefix { needed: usize, available: usize },

    #[error("noise variance must be non-negative, got {0}")]
    NegativeNoise(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
