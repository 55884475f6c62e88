//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by channel construction, conversion and classification.
#[derive(Debug, Clone, Error)]
pub enum EaError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: max |M - M^dag| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})")]
    EigNonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}); Kraus form undefined")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("operator is not rank one (second singular value {second_singular_value:.3e})")]
    NotRankOne { second_singular_value: f64 },

    #[error("q = {q} outside the completely positive range [{lo}, {hi}]")]
    OutsideCpRange { q: f64, lo: f64, hi: f64 },

    #[error("mixture weights must be nonnegative and sum to 1 (got {detail})")]
    BadWeights { detail: String },

    #[error("unsupported dimensions: {detail}")]
    UnsupportedDims { detail: String },

    #[error("resolution infeasible: constraint `{constraint}` failed ({detail})")]
    Infeasible { constraint: &'static str, detail: String },

    #[error("not a channel: {reason}")]
    NotChannel { reason: String },

    #[error("invalid channel data in field `{field}`: {reason}")]
    InvalidChannel { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, EaError>;
