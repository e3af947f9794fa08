use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed edge line: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: conflicting duplicate edge {u} {v}")]
    ConflictingDuplicate { line: usize, u: u64, v: u64 },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph is not connected: node {node} is unreachable from node {root}")]
    Disconnected { root: NodeId, node: NodeId },

    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("node {0} is not a member of the tree")]
    NotAMember(NodeId),

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(NodeId, NodeId),

    #[error("edge {0} is out of range")]
    EdgeOutOfRange(EdgeId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("infeasible generator target: {0}")]
    Infeasible(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
