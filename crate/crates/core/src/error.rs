use thiserror::Error;

use crate::node::NodeId;

/// Errors raised by diagram construction, transforms and recovery routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("ordering violation: node at level {index} has a child at level {child_level}")]
    Ordering { index: u32, child_level: u32 },

    #[error("variable index {index} out of range for {num_vars} variables")]
    VarOutOfRange { index: u32, num_vars: u32 },

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("node {0} is a terminal")]
    Terminal(NodeId),

    #[error("assignment has {got} bits, diagram has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },

    #[error("diagrams have different variable counts ({0} vs {1})")]
    VarCountMismatch(u32, u32),

    #[error("truth table has {got} entries, expected {expected}")]
    TruthTableLength { expected: usize, got: usize },

    #[error("malformed cube {cube:?}: {reason}")]
    Cube { cube: String, reason: String },

    #[error("rule not applicable: {0}")]
    RuleNotApplicable(String),

    #[error("no level of the scanned range holds node {0} in the unique table")]
    IndexNotFound(NodeId),

    #[error("pointer of node {0} is corrupted; recovery requires intact edges")]
    PointerFault(NodeId),

    #[error("no candidate child of node {0} matches the unique table")]
    EdgeNotFound(NodeId),

    #[error("{count} candidates of node {node} match the unique table bucket")]
    AmbiguousEdge { node: NodeId, count: usize },

    #[error("precondition violated: {0}")]
    Contract(String),
}

pub type Result<T, E = BddError> = std::result::Result<T, E>;
