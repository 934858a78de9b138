use thiserror::Error;

use crate::model::Move;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SandpileError {
    #[error("IPM(k) requires k >= 1")]
    InvalidPlateauBound,

    #[error("move {0:?} is not applicable to the configuration")]
    InapplicableMove(Move),

    #[error("parallel mode is not defined for {0}")]
    UnsupportedMode(String),

    #[error("no fixed point reached within {limit} steps")]
    Divergence { limit: u64 },

    #[error("orbit graph exceeds {limit} vertices")]
    VertexLimit { limit: usize },

    #[error("graph contains a cycle")]
    Cyclic,

    #[error("interval at column {start} renders a negative height")]
    NegativeHeight { start: usize },

    #[error("{what} bound exceeded: {count} > {bound}")]
    BoundExceeded {
        what: &'static str,
        count: u64,
        bound: u64,
    },

    #[error("algorithms disagree on the fixed point of {input}: {detail}")]
    Mismatch { input: String, detail: String },

    #[error("the fast algorithm only supports SPM")]
    FastRequiresSpm,
}

pub type Result<T, E = SandpileError> = std::result::Result<T, E>;
