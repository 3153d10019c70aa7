use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("constraint violated at pixel ({row}, {col}): x = {value} but f = {data}")]
    ConstraintViolation {
        row: usize,
        col: usize,
        value: f64,
        data: f64,
    },

    #[error("non-finite value after sweep {sweep}, sub-functional J{label}")]
    Numerical { sweep: usize, label: usize },

    #[error("malformed file at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("value {value} at pixel ({row}, {col}) is outside [-pi, pi)")]
    OutOfRange { row: usize, col: usize, value: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
