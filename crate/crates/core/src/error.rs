use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Association was asked to map onto an empty target set. The reference
    /// archive guarantees a nonempty participating set, so this means its
    /// state is corrupted.
    #[error("association target set is empty (corrupted reference archive state)")]
    EmptyTargets,

    #[error("simplex lattice with M={m}, H={h} requires {required} points, which exceeds the limit of {limit}")]
    LatticeTooLarge {
        m: usize,
        h: u32,
        required: String,
        limit: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{0}` has no closed-form Pareto front sampler")]
    UnsupportedProblem(String),

    #[error("confidence bound {value} at sample {index} is not positive")]
    NonPositiveBound { index: usize, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("scenario `{name}`: {reason}")]
    Scenario { name: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Configuration problems map to exit code 1, everything else to 2.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::UnknownProblem(_)
                | Error::InvalidArgument(_)
                | Error::UnsupportedProblem(_)
        )
    }
}
