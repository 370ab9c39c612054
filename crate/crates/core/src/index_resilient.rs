//! Index-resilient diagrams: every internal node at level `i` has a child at
//! level `i + 1`, so a lost index is always `min(child levels) - 1`.
//!
//! Reduction removes maximal chains of redundant nodes whose deletion keeps
//! that property. When a node has two distinct redundant children only the
//! 0-child may ever be removed, which makes the result canonical.

use std::collections::{HashSet, VecDeque};

use crate::diagram::{snapshot, Clean, Diagram, LevelSource};
use crate::error::{BddError, Result};
use crate::node::{Level, Node, NodeId};

/// Per-slot parent counter, defined only for redundant nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumPMap(Vec<Option<u32>>);

impl NumPMap {
    pub fn get(&self, id: NodeId) -> Option<u32> {
        id.slot().and_then(|s| self.0[s])
    }

    pub fn as_slice(&self) -> &[Option<u32>] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub head: NodeId,
    /// Nodes after the head, top to bottom.
    pub members: Vec<NodeId>,
    /// First node below the chain that stays.
    pub child: NodeId,
}

impl Chain {
    pub fn len(&self) -> usize {
        1 + self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::once(self.head).chain(self.members.iter().copied())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainPlan {
    pub to_remove: Vec<bool>,
    pub chains: Vec<Chain>,
}

impl ChainPlan {
    pub fn removed(&self) -> usize {
        self.to_remove.iter().filter(|f| **f).count()
    }
}

fn level_in(nodes: &[Node], n: u32, id: NodeId) -> Level {
    id.slot().map_or(n, |s| nodes[s].index)
}

fn is_redundant_in(nodes: &[Node], id: NodeId) -> bool {
    id.slot().is_some_and(|s| nodes[s].is_redundant())
}

pub fn compute_num_p(d: &Diagram) -> NumPMap {
    num_p_of(d.nodes(), d.num_vars())
}

fn num_p_of(nodes: &[Node], n: u32) -> NumPMap {
    let mut num_p: Vec<Option<u32>> = nodes
        .iter()
        .map(|node| node.is_redundant().then_some(0))
        .collect();
    let mut bump = |id: NodeId| {
        if let Some(c) = id.slot().and_then(|s| num_p[s].as_mut()) {
            *c += 1;
        }
    };
    for p in nodes {
        let both_redundant = is_redundant_in(nodes, p.lo) && is_redundant_in(nodes, p.hi);
        let lo_far = level_in(nodes, n, p.lo) > p.index + 1;
        let hi_far = level_in(nodes, n, p.hi) > p.index + 1;
        // a parent counts once per child even if both properties hold
        if both_redundant || (lo_far && p.lo != p.hi) {
            bump(p.hi);
        }
        if p.lo != p.hi && hi_far {
            bump(p.lo);
        }
    }
    NumPMap(num_p)
}

pub fn find_chains(d: &Diagram, num_p: &NumPMap) -> ChainPlan {
    chains_of(d.nodes(), d.root(), num_p)
}

fn chains_of(nodes: &[Node], root: NodeId, num_p: &NumPMap) -> ChainPlan {
    let mut plan = ChainPlan {
        to_remove: vec![false; nodes.len()],
        chains: Vec::new(),
    };
    for head in bfs_by_level(nodes, root) {
        let node = nodes[head.slot().unwrap()];
        if !node.is_redundant() || num_p.get(head) != Some(0) {
            continue;
        }
        let mut members = Vec::new();
        plan.to_remove[head.slot().unwrap()] = true;
        let mut cur = node.lo;
        while let Some(s) = cur.slot() {
            let c = nodes[s];
            if !c.is_redundant() || num_p.get(cur).unwrap_or(0) > 1 {
                break;
            }
            plan.to_remove[s] = true;
            members.push(cur);
            cur = c.lo;
        }
        plan.chains.push(Chain {
            head,
            members,
            child: cur,
        });
    }
    plan
}

/// Internal nodes ordered by level, each level in breadth-first discovery
/// order from the root.
fn bfs_by_level(nodes: &[Node], root: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut queue = VecDeque::from([root]);
    while let Some(id) = queue.pop_front() {
        let Some(s) = id.slot() else { continue };
        if seen[s] {
            continue;
        }
        seen[s] = true;
        order.push(id);
        queue.push_back(nodes[s].lo);
        queue.push_back(nodes[s].hi);
    }
    // stable: keeps discovery order inside a level
    order.sort_by_key(|id| nodes[id.slot().unwrap()].index);
    order
}

/// Removes every maximal removable chain. The input must be free of
/// mergeable nodes and index-resilient (quasi-reduced in practice).
pub fn ir_reduce(d: &Diagram) -> Result<Diagram> {
    ir_reduce_from(&mut Clean(d))
}

/// [`ir_reduce`] reading levels through `src`.
pub fn ir_reduce_from(src: &mut impl LevelSource) -> Result<Diagram> {
    let n = src.num_vars();
    let nodes = snapshot(src)?;
    if let Some(dup) = first_mergeable(&nodes) {
        return Err(BddError::Contract(format!(
            "input has mergeable nodes ({dup} is duplicated)"
        )));
    }
    let num_p = num_p_of(&nodes, n);
    let plan = chains_of(&nodes, src.root(), &num_p);
    Ok(remove_flagged(n, &nodes, src.root(), &plan.to_remove))
}

/// Redirects every edge that enters a flagged node to the first unflagged
/// node below it along 0-edges, then drops the unreachable nodes.
pub fn remove_flagged(n: u32, nodes: &[Node], root: NodeId, flagged: &[bool]) -> Diagram {
    let skip = |mut id: NodeId| {
        while let Some(s) = id.slot() {
            if !flagged[s] {
                break;
            }
            id = nodes[s].lo;
        }
        id
    };
    let scratch: Vec<Node> = nodes
        .iter()
        .map(|node| Node::new(node.index, skip(node.lo), skip(node.hi)))
        .collect();
    Diagram::compact(n, &scratch, skip(root))
}

fn first_mergeable(nodes: &[Node]) -> Option<NodeId> {
    let mut seen = HashSet::new();
    nodes
        .iter()
        .position(|node| !seen.insert(*node))
        .map(NodeId::from_slot)
}

/// No mergeable nodes and every internal node has a child exactly one level
/// below it.
pub fn is_index_resilient(d: &Diagram) -> bool {
    first_mergeable(d.nodes()).is_none()
        && d.iter()
            .all(|(_, node)| d.level(node.lo).min(d.level(node.hi)) == node.index + 1)
}

/// Index-resilient with no removable chain left, i.e. no redundant node with
/// a zero parent counter.
pub fn is_ir_reduced(d: &Diagram) -> bool {
    is_index_resilient(d) && compute_num_p(d).as_slice().iter().all(|c| *c != Some(0))
}
