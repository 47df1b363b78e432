use thiserror::Error;

use crate::report::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input table or document.
    #[error("format error: {0}")]
    Format(String),

    /// Two operands (or two structures) live on different carriers.
    #[error("structural error: {0}")]
    Structural(String),

    /// A supplied table failed the group axioms.
    #[error("not a group: {} violation(s), first: {}", .0.violations.len(), .0.first_summary())]
    InvalidGroup(ValidationReport),

    /// Semidirect constructor: `h` is not a homomorphism into Aut(X).
    #[error("construction error: {message} (witness {witness:?})")]
    Construction { message: String, witness: Vec<usize> },

    /// Radical ring whose circle operation does not form a group.
    #[error("radical ring violation: {message} (witness {witness:?})")]
    RadicalRing { message: String, witness: Vec<usize> },

    #[error("parameter error: {0}")]
    Parameter(String),

    /// An axiom fails where a value was required (e.g. a diagonal of S that does not agree).
    #[error("axiom violation: {0}")]
    AxiomViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("resource error: {0}")]
    Resource(String),

    /// The fixed-point solver did not reach the tolerance from its seed.
    #[error("no fixed point near seed: residual {residual:e} after {iterations} iterations")]
    NoSolution { residual: f64, iterations: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
