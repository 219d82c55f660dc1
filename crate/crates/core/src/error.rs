use crate::tree::{TimeIndex, VertexId};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),

    #[error("vertex {0} is not a leaf in the pre-batch snapshot")]
    NotALeaf(VertexId),

    #[error("time index {t} does not exceed the latest creation time {latest}")]
    StaleTimeIndex { t: TimeIndex, latest: TimeIndex },

    #[error("prior and likelihood cover different leaf sets")]
    LeafSetMismatch,

    #[error("all likelihood mass is zero: evidence is degenerate")]
    DegenerateEvidence,

    #[error("mixture weight q = {0} is outside [0, 1]")]
    MixtureWeightOutOfRange(String),

    #[error("all children of vertex {0} have zero branching weight")]
    ZeroWeightBranch(VertexId),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed trajectory data: {0}")]
    MalformedTrajectory(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
