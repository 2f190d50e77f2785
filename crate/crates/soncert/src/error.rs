//! Crate-wide error type.

use thiserror::Error;

/// Which ADMM block produced a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmmBlock {
    X,
    Y,
    Delta,
}

impl std::fmt::Display for AdmmBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdmmBlock::X => write!(f, "x"),
            AdmmBlock::Y => write!(f, "y"),
            AdmmBlock::Delta => write!(f, "delta"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in ADMM {block} block at iteration {iteration}")]
    NumericalBreakdown { iteration: usize, block: AdmmBlock },

    #[error("dual iterate is infeasible on edge ({i},{j}): ||delta|| = {norm} > lambda = {lambda}")]
    InfeasibleDual {
        i: usize,
        j: usize,
        norm: f64,
        lambda: f64,
    },

    #[error("certificate file: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
