//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by graph construction, colouring, avoidance and lemma checks.
#[derive(Debug, Error)]
pub enum LabError {
    /// Input violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input falls outside the regime an algorithm handles (for example φ > 7).
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// A substructure the construction has no rule for (for example a triangle
    /// where only forests on four vertices are allowed).
    #[error("unsupported structure: {0}")]
    StructureUnsupported(String),

    /// A bounded search ran out of budget before deciding.
    #[error("search budget of {budget} nodes exhausted")]
    SearchExhausted { budget: u64 },

    /// A lemma check failed on a concrete input. The payload is a JSON record
    /// suitable for archiving.
    #[error("counterexample: {0}")]
    Counterexample(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}
