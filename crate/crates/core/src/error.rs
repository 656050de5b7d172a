use thiserror::Error;

use crate::topology::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge `{edge}` has non-positive length {length}")]
    NonPositiveLength { edge: String, length: String },
    #[error("unbounded end `{0}` must have degree 1")]
    UnboundedEndDegree(String),
    #[error("point {0} is not a point of the host")]
    InvalidPoint(String),
    #[error("offset out of range: {0}")]
    OffsetOutOfRange(String),
    #[error("divisors live on different hosts")]
    HostMismatch,
    #[error("divisor is not supported on vertices: chip at {0:?}")]
    NotVertexSupported(Point),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("non-integer slope on edge {edge} piece {piece}")]
    NonIntegerSlope { edge: String, piece: usize },
    #[error("discontinuous at point {0}")]
    Discontinuous(String),
    #[error("piecewise-linear functions are not supported on hosts with infinite edges")]
    InfiniteHost,
    #[error("permutation repeats point {0}")]
    RepeatedPoint(String),
    #[error("permutation support misses branch or loop-transversal point {0}")]
    MissingSupportPoint(String),
    #[error("RR2 requires degree g-1 = {expected}, got {actual}")]
    WrongDegree { expected: i64, actual: i64 },
    #[error("enumeration budget exceeded after {0} terms")]
    BudgetExceeded(u64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
