use thiserror::Error;

use crate::spaces::MetricReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("invalid metric: {0}")]
    InvalidMetric(MetricReport),

    #[error("graph is disconnected: vertex {v} is unreachable from vertex {u}")]
    Disconnected { u: usize, v: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("geodesic count between {u} and {v} exceeds 2^53")]
    CountOverflow { u: usize, v: usize },

    #[error("similarity matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("no convergence bound: {0}")]
    NoConvergence(String),

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("points belong to different spaces")]
    MismatchedSpaces,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::NoConvergence(_) | Error::CountOverflow { .. }
        )
    }
}

pub(crate) fn out_of_range(what: impl Into<String>) -> Error {
    Error::OutOfRange(what.into())
}
