use thiserror::Error;

/// Errors produced by the simulation and validation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite data in {0}")]
    NonFinite(&'static str),

    #[error("space mismatch: expected {expected:?} representation")]
    SpaceMismatch { expected: crate::lattice::Space },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("admissibility check failed: {0}")]
    Admissibility(String),

    #[error("collision: nuclei {0} and {1} coincide or are closer than the resolvable scale")]
    Collision(usize, usize),

    #[error("{what} did not converge after {iterations} iterations (history: {history:?})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("configuration rejected: {0}")]
    Config(String),

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
