use std::fmt;

use thiserror::Error;

/// Identifies one evaluator of a [`Problem`](crate::Problem).
///
/// Constraint labels are 1-based, matching the usual `g_1, ..., g_m` numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FnId {
    Objective,
    Inequality(usize),
    Equality(usize),
}

impl fmt::Display for FnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnId::Objective => write!(f, "J"),
            FnId::Inequality(i) => write!(f, "g{i}"),
            FnId::Equality(j) => write!(f, "h{j}"),
        }
    }
}

/// Location-tagged syntax or semantic error from the problem-file reader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation of {function} failed: {detail}")]
    Evaluation { function: FnId, detail: String },

    #[error("constraint gradients are numerically dependent (reciprocal condition {rcond:.3e})")]
    LicqFailure { rcond: f64 },

    #[error("orthant quadratic solver did not converge in {iterations} iterations (residual {residual:.3e})")]
    InnerSolverStall { iterations: usize, residual: f64 },

    #[error("Newton correction did not converge in {iterations} iterations (residual {residual:.3e})")]
    NewtonStall { iterations: usize, residual: f64 },

    #[error("active constraint g{index} has <g', d> = {inner:.3e} > 0 after projection")]
    InternalProjection { index: usize, inner: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("two-sided bound {index} has lower {lower} >= upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem '{name}'; known problems: {}", known.join(", "))]
    NotFound { name: String, known: Vec<String> },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
