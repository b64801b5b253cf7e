use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Two generated points compare equal at the working precision.
    #[error("precision collision in {context} at {bits} bits; raise --precision-bits")]
    Precision { context: String, bits: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("set must be non-empty: {0}")]
    EmptySet(&'static str),

    #[error("no admissible window: {0}")]
    EmptyWindow(String),

    #[error("zero-diameter set cannot be normalized")]
    ZeroDiameter,

    #[error("graph cover missed the cell of theta={theta} in block {block}")]
    ApproximationFailure { theta: String, block: u32 },

    #[error("missing cluster k={k} n={n}")]
    MissingCluster { k: u64, n: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
