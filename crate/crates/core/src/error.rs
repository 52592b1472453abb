use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unit {unit} out of range for graph with {n} units")]
    UnitOutOfRange { unit: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("clustering is not a partition: {0}")]
    NotAPartition(String),

    #[error("rho is undefined: within-cluster weight sum is zero")]
    UndefinedRho,

    #[error("power iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::UndefinedRho | Error::Degenerate(_)
        )
    }
}
