use std::path::PathBuf;

use crate::cost_model::Label;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("rating {score} outside the declared scale [{low}, {high}]")]
    RatingOutOfScale { score: f64, low: f64, high: f64 },

    #[error("length mismatch: dataset has {expected} examples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("every example has zero cost, so NEC is undefined")]
    DegenerateCosts,

    #[error("training set has no positively weighted example of class {0}")]
    SingleClass(Label),

    #[error("class {0} has no example with non-zero cost to resample from")]
    ZeroCostClass(Label),

    #[error("class {label} has {count} examples, too few to populate train/validation/test")]
    ClassTooSmall { label: Label, count: usize },

    #[error("at least two reports are needed for a confidence interval, got {0}")]
    TooFewReports(usize),

    #[error("predictions carry no Δ estimates")]
    MissingScores,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("method {method}, seed {seed}: {source}")]
    Run {
        method: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
