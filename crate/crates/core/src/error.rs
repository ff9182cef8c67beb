use thiserror::Error;

/// Errors raised by the clustering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("focal element is empty")]
    EmptyFocal,
    #[error("mass {0} is outside the open interval (0, 1)")]
    MassOutOfRange(f64),
    #[error("frame size {0} is outside 1..=16")]
    BadFrameSize(usize),
    #[error("element {element} does not belong to a frame of size {frame_size}")]
    ElementOutOfFrame { element: usize, frame_size: usize },
    #[error("evidence at position {position} carries id {id}; ids must equal their position")]
    BadEvidenceId { position: usize, id: usize },
    #[error("conflict {0} is not below 1, weight of evidence would be infinite")]
    ConflictAtOne(f64),
    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("evidence {evidence} is already in cluster {cluster}")]
    SameCluster { evidence: usize, cluster: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("log-sum objective requires zero domain conflict, got {0}")]
    DomainConflictUnsupported(f64),
    #[error("invalid network parameters: {0}")]
    InvalidParams(String),
    #[error("unknown method `{0}` (expected neural, iterative or hybrid)")]
    UnknownMethod(String),
    #[error("unknown report format `{0}` (expected csv or json)")]
    UnknownFormat(String),
    #[error("unknown problem family `{0}` (expected exhaustive or random)")]
    UnknownFamily(String),
    #[error("bad problem size: {0}")]
    BadSize(String),
    #[error("serialization: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
