use thiserror::Error;

/// Errors produced by the pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {reason}")]
    MalformedRow { row: u64, reason: String },

    #[error("duplicate post id `{0}`")]
    DuplicatePostId(String),

    #[error("ordinal sequence for topic `{topic}` is not a contiguous 0..n-1 run: {reason}")]
    BadOrdinals { topic: String, reason: String },

    #[error(
        "cumulative sales for `{user}` decrease from {prev} (at {prev_at}) to {next} (at {next_at})"
    )]
    SalesNotMonotone {
        user: String,
        prev_at: i64,
        prev: u64,
        next_at: i64,
        next: u64,
    },

    #[error("duplicate sales observation time {at} for `{user}`")]
    DuplicateObservation { user: String, at: i64 },

    #[error("`{0}` is not a vendor: no sales observations")]
    NotAVendor(String),

    #[error("unknown user `{0}`")]
    UnknownUser(String),

    #[error("unknown measure `{name}`; valid measures: {valid}")]
    UnknownMeasure { name: String, valid: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("power iteration did not converge in {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("graph file mismatch: {0}")]
    GraphMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the underlying cause is an I/O failure rather than bad data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            Error::Json(e) => e.is_io(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
