use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the planning library, simulator and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid robot pose ({x:.3}, {y:.3}): {reason}")]
    InvalidPose { x: f64, y: f64, reason: String },

    #[error("malformed scan: expected {expected} ranges, got {actual}")]
    MalformedScan { expected: usize, actual: usize },

    #[error("start cell ({row}, {col}) is not traversable")]
    InvalidStart { row: usize, col: usize },

    #[error("dead end: {0}")]
    DeadEnd(DeadEndKind),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Why no usable end-point exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeadEndKind {
    /// No cell in the local window keeps the robot radius clear of obstacles.
    NoTraversableCell,
    /// Every forward-facing sample is shorter than the dead-end range.
    ShortRange,
}

impl std::fmt::Display for DeadEndKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeadEndKind::NoTraversableCell => f.write_str("no traversable cell in the local window"),
            DeadEndKind::ShortRange => f.write_str("all forward samples below the dead-end range"),
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl std::fmt::Display, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
