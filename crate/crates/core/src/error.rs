use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape {rows}x{cols}: {reason}")]
    Shape {
        rows: usize,
        cols: usize,
        reason: String,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error("walk capacity exhausted: line holds {t_max} steps, state is already at t = {t}")]
    Capacity { t: usize, t_max: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: String, reason: String },

    /// The SGAD formulas left the physical domain. The message carries every
    /// intermediate so the offending parameter combination can be diagnosed.
    #[error("SGAD parameters outside the physical domain: {details}")]
    ChannelDomain { details: String },

    #[error("channel is not trace preserving: max |Σ E†E - I| = {deviation:e}")]
    Incomplete { deviation: f64 },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("sweep cell {cell} ({assignment}): {source}")]
    SweepCell {
        cell: usize,
        assignment: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error at {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn parameter(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
