use std::fmt;

use thiserror::Error;

/// A triple of point indices witnessing a violated three-point condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple(pub usize, pub usize, pub usize);

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0, self.1, self.2)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not ultrametric: witness triple {0}")]
    NotUltrametric(Triple),

    #[error("{count} subsets to enumerate exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },

    /// One of the admissible/forbidden pair classes is empty. `answer` carries
    /// the direct decision when the caller supplied a target size.
    #[error("trivial instance: {reason}")]
    TrivialInstance { reason: String, answer: Option<bool> },

    #[error("far-field budget violated: measured {measured} > bound {bound}")]
    BudgetViolated {
        report: crate::bounds::BudgetReport,
        measured: f64,
        bound: f64,
    },

    #[error("series diverges for s = {0} (need s > 2)")]
    Divergent(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
