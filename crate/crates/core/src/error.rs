use thiserror::Error;

use crate::walk::WalkOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector is identically zero")]
    ZeroVector,

    #[error("dimension {0} is too small, at least 2 states are required")]
    DimensionTooSmall(usize),

    #[error("image amplitude {index} is not the conjugate of the state amplitude")]
    ImageMismatch { index: usize },

    #[error("coordinate {index} ({value}) times {chips} chips is not an integer")]
    NotChipRepresentable { index: usize, value: f64, chips: u64 },

    #[error("walk did not finish within {} steps", .outcome.steps)]
    StepLimitExceeded { outcome: Box<WalkOutcome> },

    #[error("invalid start point: {0}")]
    InvalidStart(String),

    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("Laplace inversion unstable: orders {order} and {} differ by {gap:.3e}", .order + 2)]
    InversionUnstable { order: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ensemble layouts differ: {0}")]
    IncompatibleStats(String),

    #[error("no completed trials to compare")]
    NoCompletedTrials,

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
