use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("missing input: {0}")]
    MissingInput(PathBuf),

    /// A line of a line-oriented input could not be parsed.
    #[error("{source_name}:{line}: {reason}: `{text}`")]
    Parse {
        source_name: String,
        line: usize,
        text: String,
        reason: String,
    },

    #[error("{source_name}:{line}: {reason}")]
    Ordering {
        source_name: String,
        line: usize,
        reason: String,
    },

    #[error("geometry mismatch: expected {expected_h}x{expected_w}, got {actual_h}x{actual_w}")]
    GeometryMismatch {
        expected_h: usize,
        expected_w: usize,
        actual_h: usize,
        actual_w: usize,
    },

    #[error("point ({x}, {y}) lies outside a {height}x{width} frame")]
    PointOutOfBounds {
        x: f64,
        y: f64,
        height: usize,
        width: usize,
    },

    #[error("{count} focus points exceed the limit of {limit}")]
    TooManyPoints { count: usize, limit: usize },

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("missing conditions: {}", .0.join(", "))]
    MissingConditions(Vec<String>),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn geometry(expected: (usize, usize), actual: (usize, usize)) -> Self {
        Error::GeometryMismatch {
            expected_h: expected.0,
            expected_w: expected.1,
            actual_h: actual.0,
            actual_w: actual.1,
        }
    }

    /// True for failures of the environment (reading/writing files) as
    /// opposed to failures of the input's content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
