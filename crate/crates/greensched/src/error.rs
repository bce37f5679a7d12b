//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// A field of a loaded document violates an invariant. `path` points at
    /// the offending field, e.g. `sites[0].compute.p_idle_w`.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("dependency cycle detected on edge {task} -> {parent}")]
    Cycle { task: String, parent: String },

    #[error("task {task} lists unknown parent {parent}")]
    DanglingParent { task: String, parent: String },

    #[error("no ipc entry for task {task} on site {site}")]
    MissingIpc { task: String, site: String },

    #[error("schedule has no assignment for task {task}")]
    MissingAssignment { task: String },

    #[error("ranked list key must be finite, got {value}")]
    NonFiniteKey { value: f64 },

    #[error("cannot rank resources over an empty candidate set")]
    EmptyCandidates,

    #[error("resource {resource} has no block named {block}")]
    UnknownBlock { resource: String, block: String },

    #[error("interval must be non-negative, got {0}")]
    NegativeInterval(f64),

    #[error("cannot compare against a zero-energy baseline ledger")]
    ZeroBaseline,

    #[error("ledgers cover different site sets and are not comparable")]
    MismatchedScenario,

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}
