//! Error type shared across the crate.

use crate::solvers::SolveOutcome;

/// Errors produced by construction, formulation, solving, and checking.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Vector lengths do not agree (gamble vs. outcome space, pmf vs. gamble, ...).
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    /// Outcome labels must be nonempty and pairwise distinct.
    #[error("invalid outcome space: {reason}")]
    InvalidOutcomeSpace { reason: String },

    /// Probability mass function violates nonnegativity or normalization.
    #[error("invalid pmf: {reason}")]
    InvalidPmf { reason: String },

    /// A parameter is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An operation received an LP of the wrong formulation kind.
    #[error("wrong formulation: expected {expected}, got {got}")]
    WrongFormulation { expected: &'static str, got: String },

    /// The (method, formulation) pair is not one of the supported combinations.
    #[error("unsupported method/formulation combination: {method} on {formulation}")]
    InvalidMethodChoice { method: String, formulation: String },

    /// A starting point handed to an interior-point solver is not usable.
    #[error("invalid starting point: {reason}")]
    InvalidStartPoint { reason: String },

    /// The supplied simplex basis is singular or infeasible.
    #[error("invalid basis: {reason}")]
    InvalidBasis { reason: String },

    /// A solver stopped without a usable verdict (e.g. iteration limit).
    #[error("solver gave no verdict (status {status:?})")]
    NoVerdict { status: crate::solvers::SolveStatus, diagnostics: Box<SolveOutcome> },

    /// A verdict certificate failed its independent numeric re-check.
    #[error("certificate verification failed: {reason}")]
    CertificateCheckFailed { reason: String, diagnostics: Box<SolveOutcome> },

    /// Primary solve and fallback solve produced contradicting verdicts.
    #[error("verdict conflict: primary says avoids={primary}, fallback says avoids={fallback}")]
    VerdictConflict { primary: bool, fallback: bool },

    /// The natural-extension LP is unbounded, i.e. the given set incurs sure loss.
    #[error("natural extension is unbounded: the gamble set incurs sure loss")]
    SureLossInExtension,

    /// Instance too large for the exact rational oracle.
    #[error("exact oracle size guard: n={n_gambles}, outcomes={n_outcomes} (both must be <= {limit})")]
    OracleSizeGuard { n_gambles: usize, n_outcomes: usize, limit: usize },

    /// Text parse failure (LP dump format).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
