//! Immutable diagram storage: an arena of internal nodes plus a root.
//!
//! Every diagram produced by this crate holds exactly the nodes reachable
//! from its root, numbered in depth-first order (0-edge first). Fault
//! injection may later scramble stored fields in place; the arena itself is
//! never relocated.

use std::collections::HashMap;

use crate::error::{BddError, Result};
use crate::node::{Level, Node, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    num_vars: u32,
    nodes: Vec<Node>,
    root: NodeId,
}

impl Diagram {
    /// Builds a diagram from an explicit arena. Node `k` of `nodes` gets id
    /// `NodeId::from_slot(k)`, i.e. raw id `k + 2`. The arena must be ordered
    /// and every node must be reachable from `root`.
    pub fn from_parts(num_vars: u32, nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let d = Diagram {
            num_vars,
            nodes,
            root,
        };
        d.check_id(root)?;
        for (id, node) in d.iter() {
            if node.index >= num_vars {
                return Err(BddError::VarOutOfRange {
                    index: node.index,
                    num_vars,
                });
            }
            for child in [node.lo, node.hi] {
                d.check_id(child)?;
                let child_level = d.level(child);
                if child_level <= node.index {
                    return Err(BddError::Ordering {
                        index: node.index,
                        child_level,
                    });
                }
            }
            let _ = id;
        }
        let reachable = d.reachable_preorder();
        if reachable.len() != d.nodes.len() {
            return Err(BddError::Contract(format!(
                "{} of {} arena nodes are unreachable from the root",
                d.nodes.len() - reachable.len(),
                d.nodes.len()
            )));
        }
        Ok(d)
    }

    /// Builds from a scratch arena, keeping only nodes reachable from `root`
    /// and renumbering them in depth-first 0-edge-first order.
    pub(crate) fn compact(num_vars: u32, scratch: &[Node], root: NodeId) -> Self {
        let mut order = Vec::new();
        let mut seen = vec![false; scratch.len()];
        collect_preorder(scratch, root, &mut seen, &mut order);
        let mut remap = vec![NodeId::TERM0; scratch.len()];
        for (new_slot, old) in order.iter().enumerate() {
            remap[old.slot().unwrap()] = NodeId::from_slot(new_slot);
        }
        let map = |id: NodeId| match id.slot() {
            Some(s) => remap[s],
            None => id,
        };
        let nodes = order
            .iter()
            .map(|old| {
                let n = scratch[old.slot().unwrap()];
                Node::new(n.index, map(n.lo), map(n.hi))
            })
            .collect();
        Diagram {
            num_vars,
            nodes,
            root: map(root),
        }
    }

    pub fn constant(num_vars: u32, value: bool) -> Self {
        Diagram {
            num_vars,
            nodes: Vec::new(),
            root: NodeId::terminal(value),
        }
    }

    /// The single-node diagram of variable `x_var`.
    pub fn var(num_vars: u32, var: Level) -> Result<Self> {
        if var >= num_vars {
            return Err(BddError::VarOutOfRange {
                index: var,
                num_vars,
            });
        }
        Ok(Diagram {
            num_vars,
            nodes: vec![Node::new(var, NodeId::TERM0, NodeId::TERM1)],
            root: NodeId::from_slot(0),
        })
    }

    /// Complete binary decision tree (no sharing, no reduction) for a truth
    /// table of length `2^n`. Entry `k` is the value at the assignment whose
    /// bits, read with `x_0` as the most significant one, spell `k`.
    pub fn complete_tree(num_vars: u32, table: &[bool]) -> Result<Self> {
        let expected = 1usize << num_vars;
        if table.len() != expected {
            return Err(BddError::TruthTableLength {
                expected,
                got: table.len(),
            });
        }
        if num_vars == 0 {
            return Ok(Diagram::constant(0, table[0]));
        }
        let mut nodes = Vec::with_capacity(expected - 1);
        let root = grow_tree(num_vars, 0, table, &mut nodes);
        Ok(Diagram::compact(num_vars, &nodes, root))
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Number of internal nodes; the arena holds exactly the reachable ones.
    pub fn count_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of nodes including the terminals that are reachable.
    pub fn size_with_terminals(&self) -> usize {
        let mut t = [false; 2];
        if let Some(v) = self.root.terminal_value() {
            t[v as usize] = true;
        }
        for n in &self.nodes {
            for c in [n.lo, n.hi] {
                if let Some(v) = c.terminal_value() {
                    t[v as usize] = true;
                }
            }
        }
        self.nodes.len() + t.iter().filter(|&&x| x).count()
    }

    pub fn is_constant(&self) -> Option<bool> {
        self.root.terminal_value()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        match id.slot() {
            Some(s) => s < self.nodes.len(),
            None => true,
        }
    }

    fn check_id(&self, id: NodeId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(BddError::UnknownNode(id))
        }
    }

    /// Stored node of an internal id. Panics on terminals or foreign ids.
    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.slot().expect("terminal has no node record")]
    }

    pub fn try_node(&self, id: NodeId) -> Result<Node> {
        match id.slot() {
            None => Err(BddError::Terminal(id)),
            Some(s) => self.nodes.get(s).copied().ok_or(BddError::UnknownNode(id)),
        }
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.slot().expect("terminal has no node record")]
    }

    /// Stored level of `id`; terminals sit on level `n`.
    pub fn level(&self, id: NodeId) -> Level {
        match id.slot() {
            None => self.num_vars,
            Some(s) => self.nodes[s].index,
        }
    }

    /// `(id, node)` pairs in arena order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Node)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .map(|(s, n)| (NodeId::from_slot(s), n))
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId::from_slot)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Internal nodes in depth-first order, 0-edge first.
    pub fn reachable_preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        collect_preorder(&self.nodes, self.root, &mut seen, &mut order);
        order
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.num_vars as usize {
            return Err(BddError::AssignmentLength {
                expected: self.num_vars as usize,
                got: assignment.len(),
            });
        }
        let mut cur = self.root;
        while let Some(s) = cur.slot() {
            let n = self.nodes[s];
            cur = n.child(assignment[n.index as usize]);
        }
        Ok(cur == NodeId::TERM1)
    }

    /// Evaluates on the assignment encoded by `k` (x_0 most significant).
    pub fn evaluate_index(&self, k: usize) -> bool {
        let n = self.num_vars;
        let mut cur = self.root;
        while let Some(s) = cur.slot() {
            let node = self.nodes[s];
            let bit = (k >> (n - 1 - node.index)) & 1 == 1;
            cur = node.child(bit);
        }
        cur == NodeId::TERM1
    }

    /// Full truth table, same encoding as [`Diagram::complete_tree`].
    pub fn truth_table(&self) -> Vec<bool> {
        (0..1usize << self.num_vars)
            .map(|k| self.evaluate_index(k))
            .collect()
    }

    /// Structural isomorphism by a simultaneous depth-first walk.
    pub fn isomorphic(&self, other: &Diagram) -> bool {
        if self.num_vars != other.num_vars || self.nodes.len() != other.nodes.len() {
            return false;
        }
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        let mut back: HashMap<NodeId, NodeId> = HashMap::new();
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            if a.is_terminal() || b.is_terminal() {
                if a != b {
                    return false;
                }
                continue;
            }
            match (map.get(&a), back.get(&b)) {
                (Some(&x), _) if x != b => return false,
                (_, Some(&y)) if y != a => return false,
                (Some(_), Some(_)) => continue,
                _ => {}
            }
            map.insert(a, b);
            back.insert(b, a);
            let (na, nb) = (self.node(a), other.node(b));
            if na.index != nb.index {
                return false;
            }
            stack.push((na.hi, nb.hi));
            stack.push((na.lo, nb.lo));
        }
        true
    }

    /// Maximum level among the parents of every node (by slot), `None` for
    /// nodes without parents.
    pub fn max_parent_levels(&self) -> Vec<Option<Level>> {
        let mut out = vec![None; self.nodes.len()];
        for n in &self.nodes {
            for c in [n.lo, n.hi] {
                if let Some(s) = c.slot() {
                    let slot: &mut Option<Level> = &mut out[s];
                    *slot = Some(slot.map_or(n.index, |l| l.max(n.index)));
                }
            }
        }
        out
    }

    /// Ids of the nodes that have an edge into `id`.
    pub fn parents_of(&self, id: NodeId) -> Vec<NodeId> {
        self.iter()
            .filter(|(_, n)| n.lo == id || n.hi == id)
            .map(|(p, _)| p)
            .collect()
    }

    /// Number of nodes (terminals included) reachable from `id`.
    pub fn subgraph_size(&self, id: NodeId) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut terms = [false; 2];
        let mut stack = vec![id];
        let mut count = 0;
        while let Some(cur) = stack.pop() {
            match cur.slot() {
                None => {
                    let t = &mut terms[cur.terminal_value().unwrap() as usize];
                    if !*t {
                        *t = true;
                        count += 1;
                    }
                }
                Some(s) => {
                    if seen[s] {
                        continue;
                    }
                    seen[s] = true;
                    count += 1;
                    let n = self.nodes[s];
                    stack.push(n.hi);
                    stack.push(n.lo);
                }
            }
        }
        count
    }

    /// Nodes per level, as a histogram of length `n`.
    pub fn level_profile(&self) -> Vec<usize> {
        let mut prof = vec![0; self.num_vars as usize];
        for n in &self.nodes {
            prof[n.index as usize] += 1;
        }
        prof
    }
}

fn collect_preorder(nodes: &[Node], id: NodeId, seen: &mut [bool], order: &mut Vec<NodeId>) {
    let mut stack = vec![id];
    while let Some(cur) = stack.pop() {
        let Some(s) = cur.slot() else { continue };
        if seen[s] {
            continue;
        }
        seen[s] = true;
        order.push(cur);
        let n = nodes[s];
        stack.push(n.hi);
        stack.push(n.lo);
    }
}

fn grow_tree(num_vars: u32, level: Level, table: &[bool], nodes: &mut Vec<Node>) -> NodeId {
    if level == num_vars {
        return NodeId::terminal(table[0]);
    }
    let half = table.len() / 2;
    let lo = grow_tree(num_vars, level + 1, &table[..half], nodes);
    let hi = grow_tree(num_vars, level + 1, &table[half..], nodes);
    nodes.push(Node::new(level, lo, hi));
    NodeId::from_slot(nodes.len() - 1)
}

/// Read access to node levels for transforms that may run on a diagram with
/// corrupted indices. Children are trusted; levels may need repair.
pub trait LevelSource {
    fn num_vars(&self) -> u32;
    fn root(&self) -> NodeId;
    fn arena_len(&self) -> usize;
    fn children(&self, id: NodeId) -> (NodeId, NodeId);
    fn level_of(&mut self, id: NodeId) -> Result<Level>;
}

/// Plain level access on a fault-free diagram.
pub struct Clean<'a>(pub &'a Diagram);

impl LevelSource for Clean<'_> {
    fn num_vars(&self) -> u32 {
        self.0.num_vars
    }
    fn root(&self) -> NodeId {
        self.0.root
    }
    fn arena_len(&self) -> usize {
        self.0.nodes.len()
    }
    fn children(&self, id: NodeId) -> (NodeId, NodeId) {
        let n = self.0.node(id);
        (n.lo, n.hi)
    }
    fn level_of(&mut self, id: NodeId) -> Result<Level> {
        Ok(self.0.level(id))
    }
}

/// Reads every arena node through `src`, so that each level is fetched (and
/// repaired, for guarded sources) exactly once.
pub fn snapshot(src: &mut impl LevelSource) -> Result<Vec<Node>> {
    (0..src.arena_len())
        .map(|s| {
            let id = NodeId::from_slot(s);
            let (lo, hi) = src.children(id);
            Ok(Node::new(src.level_of(id)?, lo, hi))
        })
        .collect()
}
