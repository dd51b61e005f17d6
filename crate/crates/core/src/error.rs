//! Error types shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Model parameters violate their invariants (D > 1, μ,ν,κ > 0, D̃ ≥ D).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An operation was called outside its domain (t ≤ 0, y < 0, angle out of
    /// sector, too few samples, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two independent characterizations of the same quantity disagreed
    /// beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    /// The simulated front came within the protected margin of a far
    /// boundary; results past this time would be contaminated.
    #[error("front reached the protected boundary margin at t = {t}")]
    BoundaryGuard { t: f64 },

    /// A configuration the implementation deliberately does not support.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
