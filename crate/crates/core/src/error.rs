use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("invalid sample count {0}: at least 2 points are required")]
    InvalidSampleCount(usize),
    #[error("insufficient samples for a fit: got {0}, need at least 2")]
    InsufficientSamples(usize),
    #[error("invalid region of interest: {0}")]
    InvalidRoi(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("rasterization produced no cells inside the grid")]
    EmptyRasterization,
    #[error("mask decode failed: {valid} valid lines, {required} required")]
    DecodeFailed { valid: usize, required: usize },
    #[error("score {0} outside [0, 1]")]
    InvalidScore(f64),
    #[error("positional encoding dimension {0} must be even and at least 2")]
    InvalidDim(usize),
    #[error("invalid score matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
