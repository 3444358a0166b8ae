use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset contains no rows")]
    EmptyDataset,

    #[error("row {index} has zero norm and cannot be normalized")]
    ZeroRow { index: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The iterate left the finite range or the objective blew up.
    #[error("run diverged at iteration {iteration} (objective {objective})")]
    Diverged { iteration: usize, objective: f64 },

    /// Trace bookkeeping violated one of its invariants.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
