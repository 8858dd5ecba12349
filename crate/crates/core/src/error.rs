use std::path::PathBuf;

use thiserror::Error;

use crate::timeseries::Year;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad family of an [`Error`], used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input data or arguments break a documented contract.
    Contract,
    /// Inputs are valid but the requested estimation cannot be carried out.
    Infeasible,
    /// Filesystem trouble.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{series}: duplicate year {year}")]
    DuplicateYear { series: String, year: Year },

    #[error("{series}: year {year} is out of order (years must be strictly increasing)")]
    UnorderedYears { series: String, year: Year },

    #[error("{series}: non-finite value in {year}")]
    NonFinite { series: String, year: Year },

    #[error("{series}: value {value} in {year} violates {invariant}")]
    OutOfRange {
        series: String,
        year: Year,
        value: f64,
        invariant: &'static str,
    },

    #[error("{series}: value {value} in {year} is outside the domain of {operation}")]
    Domain {
        series: String,
        year: Year,
        value: f64,
        operation: &'static str,
    },

    #[error("{series}: expected {expected}, got {found}")]
    WrongKind {
        series: String,
        expected: &'static str,
        found: String,
    },

    #[error("{series}: year {year} is missing")]
    MissingYear { series: String, year: Year },

    #[error("{series}: gap at {missing} (series must be contiguous here)")]
    Gap { series: String, missing: String },

    #[error("no overlapping years between {a} and {b}")]
    NoOverlap { a: String, b: String },

    #[error("infeasible constraints: {0}")]
    Constraint(String),

    #[error("singular fit on {start}-{end}: condition estimate {condition:.3e}")]
    SingularFit {
        start: Year,
        end: Year,
        condition: f64,
    },

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: {source}", file.display())]
    AtLine {
        file: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Constraint(_)
            | Error::SingularFit { .. }
            | Error::DegenerateRegression(_)
            | Error::Refused(_) => ErrorClass::Infeasible,
            Error::Io { .. } => ErrorClass::Io,
            Error::AtLine { source, .. } => source.class(),
            _ => ErrorClass::Contract,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The year an invariant violation refers to, if any.
    pub fn year(&self) -> Option<Year> {
        match self {
            Error::DuplicateYear { year, .. }
            | Error::UnorderedYears { year, .. }
            | Error::NonFinite { year, .. }
            | Error::OutOfRange { year, .. }
            | Error::Domain { year, .. }
            | Error::MissingYear { year, .. } => Some(*year),
            _ => None,
        }
    }
}
