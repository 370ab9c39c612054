use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::node::{Level, Node, NodeId};
use crate::unique::{UniqueTable, DEFAULT_BUCKETS};

/// Which reduction rules [`Builder::mk_node`] enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceMode {
    /// Merge rule and deletion rule: canonical ROBDD.
    Robdd,
    /// Merge rule only: redundant nodes are kept (quasi-reduced style).
    KeepRedundant,
}

/// Hash-consing node store. Single writer; call [`Builder::finish`] to obtain
/// an immutable [`Diagram`].
#[derive(Clone, Debug)]
pub struct Builder {
    num_vars: u32,
    mode: ReduceMode,
    nodes: Vec<Node>,
    table: UniqueTable,
}

impl Builder {
    pub fn new(num_vars: u32, mode: ReduceMode) -> Self {
        Self::with_buckets(num_vars, mode, DEFAULT_BUCKETS)
    }

    pub fn with_buckets(num_vars: u32, mode: ReduceMode, buckets: usize) -> Self {
        Builder {
            num_vars,
            mode,
            nodes: Vec::new(),
            table: UniqueTable::new(num_vars, buckets),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn mode(&self) -> ReduceMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn table(&self) -> &UniqueTable {
        &self.table
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.slot().expect("terminal has no node record")]
    }

    pub fn level(&self, id: NodeId) -> Level {
        match id.slot() {
            None => self.num_vars,
            Some(s) => self.nodes[s].index,
        }
    }

    fn check_child(&self, index: Level, child: NodeId) -> Result<()> {
        if let Some(s) = child.slot() {
            if s >= self.nodes.len() {
                return Err(BddError::UnknownNode(child));
            }
        }
        let child_level = self.level(child);
        if child_level <= index {
            return Err(BddError::Ordering { index, child_level });
        }
        Ok(())
    }

    /// Returns the node `[index, lo, hi]`, creating it only when needed.
    ///
    /// In [`ReduceMode::Robdd`] a redundant triple collapses to `lo`. In both
    /// modes an existing identical triple is returned instead of a new node.
    pub fn mk_node(&mut self, index: Level, lo: NodeId, hi: NodeId) -> Result<NodeId> {
        if index >= self.num_vars {
            return Err(BddError::VarOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        self.check_child(index, lo)?;
        self.check_child(index, hi)?;
        if self.mode == ReduceMode::Robdd && lo == hi {
            return Ok(lo);
        }
        let nodes = &self.nodes;
        if let Some(existing) = self
            .table
            .find(index, lo, hi, |id| nodes[id.slot().unwrap()])
        {
            return Ok(existing);
        }
        self.nodes.push(Node::new(index, lo, hi));
        let id = NodeId::from_slot(self.nodes.len() - 1);
        self.table.insert(index, lo, hi, id);
        Ok(id)
    }

    /// Freezes the store into a diagram rooted at `root`, keeping only the
    /// nodes reachable from it.
    pub fn finish(self, root: NodeId) -> Diagram {
        Diagram::compact(self.num_vars, &self.nodes, root)
    }
}
