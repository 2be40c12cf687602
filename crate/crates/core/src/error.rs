use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} needs {requested} qubits, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("shape mismatch: expected dimension {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("promise cannot hold: {0}")]
    PromiseImpossible(String),

    #[error("integration failed: norm drift {drift:e} exceeds {limit:e}")]
    Integration { drift: f64, limit: f64 },

    #[error("measurement selected a branch of probability {probability:e}")]
    ZeroProbabilityBranch { probability: f64 },

    #[error("GF(2) system has full rank {rank} = n; rows are inconsistent with a nonzero mask")]
    Contradiction { rank: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
