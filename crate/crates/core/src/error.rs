use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("{0}")]
    Parse(String),

    #[error("config {path}: {}", .problems.join("; "))]
    Config { path: PathBuf, problems: Vec<String> },

    #[error("wavevector closure violated: k12 + k23 - k13 = {residual:e}")]
    Closure { residual: f64 },

    #[error("matrix is not Hermitian: |H[{row}][{col}] - conj(H[{col}][{row}])| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("non-finite state after step at t = {time}")]
    NonFinite { time: f64 },

    #[error("integration failed for {species} particle {particle} at t = {time}")]
    Integration { species: String, particle: usize, time: f64 },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    /// Process exit code: 1 for physics/validation failures, 2 for usage and
    /// configuration problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } | Error::Integration { .. } => 1,
            Error::Io { .. } | Error::Csv(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
