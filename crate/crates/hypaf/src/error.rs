//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (bad index, bad size).
    #[error("domain error: {0}")]
    Domain(String),

    /// A mathematical precondition does not hold for the given input.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// A numerical procedure failed to reach its target accuracy.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The inverse curvature flow produced a non-admissible field.
    #[error("flow breakdown at t = {t}, node {node}: {message}")]
    FlowBreakdown { t: f64, node: usize, message: String },

    /// A file did not match the expected plain-text format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
