//! Quasi-reduced diagrams (merge rule only, every edge spans one level) and
//! the two transforms that turn a raw diagram into one without relying on a
//! unique table.

use std::collections::HashMap;

use crate::builder::{Builder, ReduceMode};
use crate::diagram::{snapshot, Clean, Diagram, LevelSource};
use crate::error::Result;
use crate::node::{Level, Node, NodeId};

/// Quasi-reduced form of `d`. The root is always at level 0, so a constant
/// function becomes a chain of `n` redundant nodes.
pub fn build_qr(d: &Diagram) -> Diagram {
    let mut out = Builder::new(d.num_vars(), ReduceMode::KeepRedundant);
    let mut memo = HashMap::new();
    let root = qr_rec(d, 0, d.root(), &mut out, &mut memo);
    out.finish(root)
}

fn qr_rec(
    d: &Diagram,
    level: Level,
    id: NodeId,
    out: &mut Builder,
    memo: &mut HashMap<(Level, NodeId), NodeId>,
) -> NodeId {
    if level == d.num_vars() {
        debug_assert!(id.is_terminal());
        return id;
    }
    if let Some(&r) = memo.get(&(level, id)) {
        return r;
    }
    let (lo, hi) = if d.level(id) > level {
        let c = qr_rec(d, level + 1, id, out, memo);
        (c, c)
    } else {
        let n = d.node(id);
        (
            qr_rec(d, level + 1, n.lo, out, memo),
            qr_rec(d, level + 1, n.hi, out, memo),
        )
    };
    let r = out
        .mk_node(level, lo, hi)
        .expect("children are one level below");
    memo.insert((level, id), r);
    r
}

/// True when every edge (including edges into terminals and the implicit
/// edge into the root) spans exactly one level.
pub fn is_level_complete(d: &Diagram) -> bool {
    let root_ok = if d.root().is_terminal() {
        d.num_vars() == 0
    } else {
        d.level(d.root()) == 0
    };
    root_ok
        && d.iter()
            .all(|(_, n)| d.level(n.lo) == n.index + 1 && d.level(n.hi) == n.index + 1)
}

/// Inserts a fresh chain of redundant nodes on every edge that skips levels,
/// and above the root when it is not at level 0. Chains are not shared, so
/// the output usually contains mergeable nodes.
pub fn pad_chains(d: &Diagram) -> Diagram {
    pad_chains_from(&mut Clean(d)).expect("clean levels never fail")
}

/// [`pad_chains`] reading levels through `src`.
pub fn pad_chains_from(src: &mut impl LevelSource) -> Result<Diagram> {
    let n = src.num_vars();
    let old = snapshot(src)?;
    let level = |id: NodeId| id.slot().map_or(n, |s| old[s].index);
    let mut scratch = old.clone();
    let chain = |from: i64, to: NodeId, scratch: &mut Vec<Node>| {
        let mut cur = to;
        for l in ((from + 1) as Level..level(to)).rev() {
            scratch.push(Node::new(l, cur, cur));
            cur = NodeId::from_slot(scratch.len() - 1);
        }
        cur
    };
    for s in 0..old.len() {
        let node = old[s];
        let lo = chain(node.index as i64, node.lo, &mut scratch);
        let hi = chain(node.index as i64, node.hi, &mut scratch);
        scratch[s] = Node::new(node.index, lo, hi);
    }
    let root = chain(-1, src.root(), &mut scratch);
    Ok(Diagram::compact(n, &scratch, root))
}

/// Applies the merge rule bottom-up with a linear scan over the nodes kept so
/// far at the same level. Uses no hashing, at O(m^2) worst-case cost.
pub fn merge_quadratic(d: &Diagram) -> Diagram {
    merge_quadratic_from(&mut Clean(d)).expect("clean levels never fail")
}

/// [`merge_quadratic`] reading levels through `src`.
pub fn merge_quadratic_from(src: &mut impl LevelSource) -> Result<Diagram> {
    let n = src.num_vars();
    let old = snapshot(src)?;
    let mut kept: Vec<Node> = Vec::new();
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); n as usize];
    let mut remap: Vec<Option<NodeId>> = vec![None; old.len()];
    let root = merge_rec(&old, src.root(), &mut kept, &mut by_level, &mut remap);
    Ok(Diagram::compact(n, &kept, root))
}

fn merge_rec(
    old: &[Node],
    id: NodeId,
    kept: &mut Vec<Node>,
    by_level: &mut [Vec<usize>],
    remap: &mut [Option<NodeId>],
) -> NodeId {
    let Some(s) = id.slot() else { return id };
    if let Some(r) = remap[s] {
        return r;
    }
    let node = old[s];
    let lo = merge_rec(old, node.lo, kept, by_level, remap);
    let hi = merge_rec(old, node.hi, kept, by_level, remap);
    let candidate = Node::new(node.index, lo, hi);
    let row = &mut by_level[node.index as usize];
    let r = match row.iter().find(|&&k| kept[k] == candidate) {
        Some(&k) => NodeId::from_slot(k),
        None => {
            kept.push(candidate);
            row.push(kept.len() - 1);
            NodeId::from_slot(kept.len() - 1)
        }
    };
    remap[s] = Some(r);
    r
}

/// Merge through the hash-consing builder instead of the quadratic scan.
/// Faster, but relies on a hash table; meant for non-resilient comparisons.
pub fn merge_hashed(d: &Diagram) -> Diagram {
    crate::ops::rebuild(d, ReduceMode::KeepRedundant)
}

/// True when two distinct nodes share `(index, lo, hi)`.
pub fn has_mergeable(d: &Diagram) -> bool {
    let mut seen = std::collections::HashSet::new();
    d.nodes().iter().any(|n| !seen.insert(*n))
}
