use thiserror::Error;

use crate::{PointId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Vertices `a` and `b` lie in different connected components.
    #[error("graph is disconnected: vertex {a} cannot reach vertex {b}")]
    DisconnectedGraph { a: VertexId, b: VertexId },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("point count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("epsilon {0} outside (0, 1/4]")]
    InvalidEpsilon(f64),

    #[error("unknown point {0}")]
    UnknownPoint(PointId),

    #[error("level {level} outside 0..={top}")]
    LevelOutOfRange { level: usize, top: usize },

    #[error("edge length {length} does not exceed C_eps = {c_eps}; metric was not normalized")]
    LevelUnderflow { length: f64, c_eps: f64 },

    #[error("invalid convex-closure point: {0}")]
    InvalidPoint(String),

    #[error("no long edges at vertex {u} for radius {r}")]
    EmptyLongEdgeSet { u: VertexId, r: f64 },

    #[error("star has {leaves} leaves but the certificate needs {needed}")]
    TooFewLeaves { leaves: usize, needed: usize },

    #[error("graph has {found} vertices, lcp metric has {expected} points")]
    VertexSetMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
