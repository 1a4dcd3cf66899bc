//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate parameter point: {0}")]
    Degenerate(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("series did not pass the tail certificate: {0}")]
    Truncation(String),

    #[error("path tracking failed: {0}")]
    Tracking(String),

    #[error("exact value not representable in this ring: {0}")]
    Inexact(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
