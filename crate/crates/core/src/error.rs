//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coefficients are not Hermitian-symmetric (max asymmetry {max_asymmetry:.3e})")]
    NonHermitian { max_asymmetry: f64 },

    #[error("{context}: input must have zero mean, found mean {mean:.3e}")]
    NonZeroMean { context: &'static str, mean: f64 },

    #[error("field '{field}' carries energy outside the dealias radius (max excess {max_excess:.3e})")]
    NotDealiased { field: &'static str, max_excess: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dyadic block index {j} out of range (j >= -1 required)")]
    BlockIndex { j: i32 },

    #[error("{context}: input field is identically zero")]
    ZeroField { context: &'static str },

    #[error("integration failure at t = {time}: non-finite values in '{field}'")]
    IntegrationFailure { time: f64, field: String },

    #[error("config error at '{path}': {message}")]
    Config { path: String, message: String },

    #[error("unknown initial condition '{name}'")]
    UnknownIc { name: String },

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 integration, 4 invariant/contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::UnknownIc { .. } | Error::InvalidGrid(_) => 2,
            Error::IntegrationFailure { .. } => 3,
            Error::Io(_) | Error::Snapshot(_) => 2,
            _ => 4,
        }
    }
}
