use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value at component {index}")]
    NonFiniteInput { index: usize },

    #[error("vectors must have at least one component")]
    EmptyVector,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("model has no classes")]
    EmptyModel,

    #[error("gold and predicted label lists differ in length ({golds} vs {preds})")]
    LengthMismatch { golds: usize, preds: usize },

    #[error("unknown label '{0}'")]
    UnknownLabel(String),

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("no runs to aggregate")]
    EmptyRuns,

    #[error("runs do not share the same label set")]
    LabelSetMismatch,

    #[error("class '{label}' has {available} members, need {required}")]
    InsufficientClassSize {
        label: String,
        available: usize,
        required: usize,
    },

    #[error("duplicate id '{0}'")]
    DuplicateId(String),

    #[error("dataset is missing class '{0}'")]
    MissingClass(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: {source}")]
    AtLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_line(self, path: impl Into<PathBuf>, line: usize) -> Self {
        Error::AtLine {
            path: path.into(),
            line,
            source: Box::new(self),
        }
    }

    /// Unwraps positional context, returning the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}
