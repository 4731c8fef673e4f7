//! Error type shared across the library.

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by configuration validation, simulation operations and
/// report emission.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Two inputs disagree on a dimension, or an index is out of bounds.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A count exceeds its admissible range.
    #[error("{what} out of range: {value} exceeds {max}")]
    Range {
        what: &'static str,
        value: usize,
        max: usize,
    },

    /// A ratio was requested against a zero denominator.
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    /// An estimator tag that is not one of the four known tags.
    #[error("unknown estimator tag `{0}`")]
    UnknownEstimator(String),

    /// A sweep spec failed validation.
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    /// An I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
