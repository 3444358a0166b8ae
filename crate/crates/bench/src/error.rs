use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad data in {}", path.display())]
    Data {
        path: PathBuf,
        #[source]
        source: proxvr::Error,
    },

    #[error("run with seed {seed} failed")]
    Diverged {
        seed: u64,
        #[source]
        source: proxvr::Error,
    },

    #[error(transparent)]
    Solver(#[from] proxvr::Error),

    #[error("nothing to write: {0}")]
    Empty(&'static str),
}

impl BenchError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Solver(proxvr::Error::InvalidArgument(_)) => 2,
            BenchError::Io { .. } | BenchError::Data { .. } => 3,
            BenchError::Diverged { .. } => 4,
            BenchError::Solver(_) | BenchError::Empty(_) => 1,
        }
    }
}
