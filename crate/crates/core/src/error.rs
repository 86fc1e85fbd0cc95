use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite score at index {index}")]
    NonFiniteScore { index: usize },

    #[error("non-finite threshold")]
    NonFiniteThreshold,

    #[error("row of length {n} is shorter than k = {k}")]
    RowTooShort { n: usize, k: usize },

    #[error("index {index} out of range for row of length {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate index {0} in prediction set")]
    DuplicateIndex(u32),

    #[error("expected {expected} elements, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("{count} candidates exceed capacity {cap}")]
    CandidateOverflow { count: usize, cap: usize },

    #[error("per-chunk count cache does not match threshold (chunk {chunk}: cached {cached}, found {found})")]
    CacheMismatch { chunk: usize, cached: usize, found: usize },

    #[error("only {count} candidates for k = {k}")]
    TooFewCandidates { count: usize, k: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("division by zero traffic")]
    ZeroDenominator,

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("selector failed at decode step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("bad row file magic")]
    BadMagic,

    #[error("truncated payload: header declares {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
