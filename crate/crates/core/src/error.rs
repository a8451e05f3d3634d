use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("individual index {index} out of range for population {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("instance too large: {candidates} candidate configurations exceed cap {cap}")]
    InstanceTooLarge { candidates: u128, cap: u128 },

    #[error("planted configuration is not consistent with the test results")]
    InconsistentTruth,

    #[error("argument outside domain: {0}")]
    OutOfDomain(String),

    #[error("search ceiling of {ceiling} tests reached without hitting target rate {target}")]
    SearchCeiling { ceiling: usize, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
