use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("I/O error: {0}")]
    Write(#[from] std::io::Error),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("skill `{0}` is not in the vocabulary")]
    UnknownSkill(String),

    #[error("seed skill `{0}` is not in the vocabulary")]
    UnknownSeed(String),

    #[error(
        "{rejected} of {total} records rejected ({:.2}%), above the {:.2}% limit: {summary}",
        100.0 * *rejected as f64 / *total as f64,
        100.0 * threshold
    )]
    TooManyRejects {
        rejected: usize,
        total: usize,
        threshold: f64,
        summary: String,
    },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed mapping at line {line}: {reason}")]
    MalformedMapping { line: usize, reason: String },

    #[error("series too short: need at least {required} days, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("report has no baseline group `{0}`")]
    MissingBaseline(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
