use thiserror::Error;

/// Errors produced by the measure, operator, simulation, estimation and metric layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid measure at index {index}: {reason}")]
    InvalidMeasure { index: usize, reason: String },

    #[error("surface evaluated off its grid at (s = {s}, t = {t})")]
    OffGrid { s: f64, t: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coefficient convention mismatch: expected {expected}, found {found}")]
    ConventionMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("measure does not fit regression case `{case}`: {reason}")]
    CaseMismatch { case: &'static str, reason: String },

    #[error("degenerate design: every singular value fell below the truncation threshold")]
    DegenerateDesign,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
            _ => Error::Csv(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
