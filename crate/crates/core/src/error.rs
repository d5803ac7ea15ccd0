//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BraidError {
    /// An argument outside the domain of an operation (e.g. `N < 2`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set that does not match the independent index set for its `N`.
    #[error("constraint violation at {index}: {reason}")]
    ConstraintViolation { index: String, reason: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A requested operator exceeds the configured memory budget.
    #[error("resource limit exceeded: {what} = {requested} exceeds budget {limit}")]
    Resource {
        what: String,
        requested: usize,
        limit: usize,
    },

    /// The spectral parameter `lambda` sits too close to an excluded value.
    #[error("lambda = {lambda} lies within {margin:e} of excluded value {excluded}")]
    Singular {
        lambda: String,
        excluded: String,
        margin: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BraidError>;
