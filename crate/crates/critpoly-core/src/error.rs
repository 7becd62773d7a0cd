//! Error type shared across the workspace.

use thiserror::Error;

/// Errors produced by the critical-polynomial computation stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Underlying I/O failure (cache files, fixtures).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a fixture, cache file or report.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// A curve fixture is missing from the fixture directory and the cache.
    #[error("missing curve fixture: {0}")]
    MissingFixture(String),

    /// A curve model failed validation (wrong conductor support, singular model, ...).
    #[error("invalid curve data: {0}")]
    BadCurve(String),

    /// An eta quotient failed admissibility or a prescribed-divisor solve failed.
    #[error("eta quotient error: {0}")]
    Eta(String),

    /// No relation of the expected shape exists at the solved order.
    #[error("relation solver failed: {0}")]
    NoRelation(String),

    /// Cross-prime or internal consistency check failed (division not exact,
    /// degree votes disagree, verification prime mismatch, ...).
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    /// Floating-point precision was insufficient even after retries.
    #[error("precision failure: {0}")]
    Precision(String),

    /// Remote curve database error.
    #[error("fetch error: {0}")]
    Fetch(String),

    /// Requested operation is outside the supported parameter range.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed command-line or file input.
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
