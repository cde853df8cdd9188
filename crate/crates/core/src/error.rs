use thiserror::Error;

use crate::sdp::InnerSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value; `path` names the offending field, e.g. `pso.mu`.
    #[error("invalid configuration at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("unknown node id `{0}` (expected one of S, D, R1, R2, I1, I2)")]
    UnknownNode(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("barrier solver did not converge: {msg}")]
    Solver {
        msg: String,
        last: Box<InnerSolution>,
    },

    #[error("exhaustive search too large: {levels}^{elements} grid points exceeds the guard")]
    OracleTooLarge { levels: usize, elements: usize },

    #[error("incomplete row set, missing: {}", .0.join("; "))]
    IncompleteRows(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
