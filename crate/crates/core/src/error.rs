use std::time::Duration;

use thiserror::Error;

/// Every failure the toolkit distinguishes.
///
/// Budget exhaustion is always reported separately from a negative answer:
/// a search that ran out of nodes says nothing about feasibility.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(String, String),

    #[error("modulus must be positive, got {0}")]
    InvalidModulus(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("search budget exceeded after {nodes} nodes ({elapsed:?})")]
    BudgetExceeded { nodes: u64, elapsed: Duration },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{a} + {d}Z is not eligible (gcd {gcd})")]
    NotEligible { a: String, d: u64, gcd: u64 },

    #[error("{x} is not in the progression {a} + {d}Z")]
    NotInProgression { x: String, a: u64, d: u64 },

    #[error("h({0}) is unavailable")]
    Unavailable(usize),

    #[error("no available k proves d = {d}; largest provable d is {max_d}")]
    NotProvable { d: u64, max_d: u64 },

    #[error("{0} is outside the supported range")]
    OutOfRange(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error on line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for the budget outcome, which callers map to a distinct exit status.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::ResourceLimit(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
