//! Error types shared across the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input value violates a documented invariant.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// A problem failed validation; every violation is listed.
    #[error("invalid problem: {}", .0.join("; "))]
    InvalidProblem(Vec<String>),

    #[error("{what} index {index} out of range (count {count})")]
    Index {
        what: &'static str,
        index: usize,
        count: usize,
    },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// The reduced stiffness matrix is singular.
    #[error("insufficient constraints: reduced system is singular at equation {equation}")]
    InsufficientConstraints { equation: usize },

    #[error("solver failed to reach tolerance: achieved relative residual {residual:e}")]
    SolverResidual { residual: f64 },

    #[error("eigensolver: {0}")]
    Eigen(String),

    /// The optimality-criteria bisection could not meet the volume target.
    #[error("volume constraint infeasible: target {target}, achievable volume fraction {achieved}")]
    VolumeBracket { target: f64, achieved: f64 },

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("design vanished: no solid elements remain")]
    DesignVanished,

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for numerical failures (singular systems, residual, eigen, OC bracket),
    /// false for bad input.
    pub fn is_solver_error(&self) -> bool {
        match self {
            Error::InsufficientConstraints { .. }
            | Error::SolverResidual { .. }
            | Error::Eigen(_)
            | Error::VolumeBracket { .. }
            | Error::DesignVanished => true,
            Error::AtIteration { source, .. } => source.is_solver_error(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
