use std::path::PathBuf;

use crate::baselines::LinearModel;
use crate::domain::LwrModel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("label must be +1 or -1, got {0}")]
    InvalidLabel(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in row {row} ({id}), column {col}")]
    NonFinite { id: String, row: usize, col: usize },

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("sample id `{0}` is missing")]
    MissingId(String),

    #[error("sample id `{0}` is not listed in the label file")]
    UnexpectedId(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("both labels are required: {0}")]
    SingleClass(String),

    #[error("duplicate rejection cost {0} in curve")]
    DuplicateCost(f64),

    #[error("calibration slope {0} is negative; scores and labels disagree in orientation")]
    Orientation(f64),

    #[error("problem too large for the reference solver: {0}")]
    TooLarge(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("training did not converge after {iterations} iterations (best objective {objective})")]
    NotConverged {
        iterations: usize,
        objective: f64,
        best: Box<LwrModel>,
    },

    #[error("svm training did not converge after {iterations} iterations (best objective {objective})")]
    SvmNotConverged {
        iterations: usize,
        objective: f64,
        best: Box<LinearModel>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
