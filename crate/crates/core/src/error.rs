use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid alpha {alpha} for n = {n}: need 1 <= ceil(alpha * n) <= n")]
    InvalidAlpha { alpha: f64, n: usize },

    #[error("invalid trimming configuration: {0}")]
    InvalidConfig(String),

    /// Every observation ended up with zero weight.
    #[error("degenerate trimming: all {n} weights are zero (beta = {beta})")]
    DegenerateTrim { n: usize, beta: f64 },

    #[error("no trimmed observations: complement mean is undefined")]
    NoTrimmedObservations,

    #[error("breakdown formula hypothesis violated: {0}")]
    BreakdownHypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by a configuration that leaves nothing to estimate.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTrim { .. } | Error::NoTrimmedObservations | Error::Degenerate(_)
        )
    }

    /// True for malformed input files or configurations.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Config { .. } | Error::Json(_) | Error::Csv(_)
        )
    }
}
