use thiserror::Error;

/// Errors produced by the beamforming library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("state error: {0}")]
    State(String),

    #[error("degenerate steering estimate: projected correlation vector has norm {norm:e}")]
    DegenerateSteering { norm: f64 },

    #[error("degenerate interference-plus-noise matrix: spectral norm {norm:e}")]
    DegenerateMatrix { norm: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("snapshot {snapshot}: {source}")]
    AtSnapshot {
        snapshot: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trial {trial}: {source}")]
    AtTrial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_snapshot(self, snapshot: usize) -> Self {
        Error::AtSnapshot {
            snapshot,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_trial(self, trial: usize) -> Self {
        Error::AtTrial {
            trial,
            source: Box::new(self),
        }
    }

    /// Strips coordinate wrappers and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSnapshot { source, .. } | Error::AtTrial { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
