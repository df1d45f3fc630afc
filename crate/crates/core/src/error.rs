use thiserror::Error;

use crate::topology::SwitchId;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} spaces, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("infeasible configuration: {0}")]
    Config(String),

    #[error("unknown switch {0}")]
    UnknownSwitch(SwitchId),

    #[error("graph is disconnected: no path from {0} to {1}")]
    Disconnected(SwitchId, SwitchId),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("topology violates {} invariant(s): {}", .0.len(), .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
