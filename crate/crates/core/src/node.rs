use std::fmt;

use serde::Serialize;

/// Variable level. Variable `x_i` sits on level `i`; terminals use the
/// pseudo-level `n` (one below the last variable).
pub type Level = u32;

/// Handle of a node inside a [`Diagram`](crate::Diagram) arena.
///
/// The two terminals have fixed ids shared by every diagram; internal nodes
/// are numbered from 2 upwards in arena order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERM0: NodeId = NodeId(0);
    pub const TERM1: NodeId = NodeId(1);

    const NUM_TERMINALS: u32 = 2;

    pub fn terminal(value: bool) -> Self {
        if value {
            Self::TERM1
        } else {
            Self::TERM0
        }
    }

    pub(crate) fn from_slot(slot: usize) -> Self {
        NodeId(slot as u32 + Self::NUM_TERMINALS)
    }

    /// Arena slot of an internal node, `None` for terminals.
    pub fn slot(self) -> Option<usize> {
        self.0.checked_sub(Self::NUM_TERMINALS).map(|s| s as usize)
    }

    pub fn is_terminal(self) -> bool {
        self.0 < Self::NUM_TERMINALS
    }

    /// Value of a terminal id.
    pub fn terminal_value(self) -> Option<bool> {
        match self.0 {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        }
    }

    /// The raw integer behind the handle. Unique-table hashing works on this
    /// value.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn from_raw(raw: u32) -> Self {
        NodeId(raw)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "T0"),
            1 => write!(f, "T1"),
            _ => write!(f, "#{}", self.0),
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Internal node `[index, 0-child, 1-child]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    pub index: Level,
    pub lo: NodeId,
    pub hi: NodeId,
}

impl Node {
    pub fn new(index: Level, lo: NodeId, hi: NodeId) -> Self {
        Node { index, lo, hi }
    }

    /// Both edges lead to the same node.
    pub fn is_redundant(&self) -> bool {
        self.lo == self.hi
    }

    pub fn child(&self, edge: bool) -> NodeId {
        if edge {
            self.hi
        } else {
            self.lo
        }
    }
}
