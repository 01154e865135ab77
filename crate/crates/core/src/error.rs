use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("neighbor rank {k} out of range 1..={n}")]
    RankOutOfRange { k: usize, n: usize },

    #[error("query point coincides with at least {k} data points (k-th neighbor distance is 0)")]
    DegenerateDistance { k: usize },

    #[error(
        "point {index} has at least {k_den} coincident copies; deduplicate or jitter the input"
    )]
    DuplicateOverload { index: usize, k_den: usize },

    #[error("density profile was built for a different point cloud")]
    CloudMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate grid axis {axis}: points have zero extent, pass an explicit grid")]
    DegenerateGrid { axis: usize },

    #[error("unknown {what} `{name}`; available: {available}")]
    UnknownName {
        what: &'static str,
        name: String,
        available: String,
    },

    #[error("brute-force bottleneck is capped at {cap} off-diagonal points, got {got}")]
    SizeCapExceeded { cap: usize, got: usize },

    #[error("voronoi construction failed after {attempts} site draws")]
    DegenerateVoronoi { attempts: usize },

    #[error("replicate {replicate} still hit duplicate overload after {attempts} redraws")]
    ReplicateRetriesExhausted { replicate: usize, attempts: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_)
            | Error::UnknownName { .. }
            | Error::RankOutOfRange { .. }
            | Error::SizeCapExceeded { .. } => ErrorClass::Config,
            Error::InvalidCloud(_)
            | Error::CloudMismatch
            | Error::DegenerateGrid { .. }
            | Error::Format(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => ErrorClass::Data,
            Error::DegenerateDistance { .. }
            | Error::DuplicateOverload { .. }
            | Error::DegenerateVoronoi { .. }
            | Error::ReplicateRetriesExhausted { .. } => ErrorClass::Numerical,
        }
    }
}
