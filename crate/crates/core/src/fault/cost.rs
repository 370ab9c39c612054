use serde::Serialize;

use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::node::{Level, Node, NodeId};

/// Index reconstruction cost: `C(N) = |I_N|` per node, its sum and mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    /// `C(N)` by arena slot.
    pub per_node: Vec<u32>,
    pub total: u64,
    pub nodes: usize,
}

impl CostReport {
    /// `C_t / k`, or 0 for a diagram without internal nodes.
    pub fn mean(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.total as f64 / self.nodes as f64
        }
    }

    pub fn of(&self, id: NodeId) -> u32 {
        self.per_node[id.slot().expect("terminals have no cost")]
    }
}

fn range_len(d: &Diagram, max_parent: Option<Level>, node: &Node) -> u32 {
    let lower = max_parent.map_or(0, |l| l + 1);
    let upper = d.level(node.lo).min(d.level(node.hi)) - 1;
    upper + 1 - lower
}

pub fn cost_report(d: &Diagram) -> CostReport {
    let max_parent = d.max_parent_levels();
    let per_node: Vec<u32> = d
        .nodes()
        .iter()
        .zip(&max_parent)
        .map(|(n, mp)| range_len(d, *mp, n))
        .collect();
    CostReport {
        total: per_node.iter().map(|&c| c as u64).sum(),
        nodes: per_node.len(),
        per_node,
    }
}

/// Outcome of one merge-rule application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeCheck {
    pub kept: NodeId,
    pub before: u64,
    pub after: u64,
    pub delta: i64,
    /// `-sum of C(N_j)` over the nodes that disappear.
    pub formula: i64,
}

/// Merges the identical nodes of `group` into `keep` (by default the member
/// with the smallest cost, lowest id on ties) and measures the change of
/// `C_t`. The merged node inherits the narrowest range of the group, so the
/// formula is exact only for that default choice; any other choice gives a
/// delta no larger than the formula.
pub fn check_merge_delta(
    d: &Diagram,
    group: &[NodeId],
    keep: Option<NodeId>,
) -> Result<(Diagram, MergeCheck)> {
    let not_applicable = |why: &str| Err(BddError::RuleNotApplicable(why.to_string()));
    if group.len() < 2 {
        return not_applicable("merge needs at least two nodes");
    }
    let first = d.try_node(group[0])?;
    for (i, &id) in group.iter().enumerate() {
        if d.try_node(id)? != first {
            return not_applicable("nodes of the group differ");
        }
        if group[..i].contains(&id) {
            return not_applicable("group lists a node twice");
        }
    }
    let before = cost_report(d);
    let kept = match keep {
        Some(k) if group.contains(&k) => k,
        Some(_) => return not_applicable("kept node is not in the group"),
        None => *group
            .iter()
            .min_by_key(|id| (before.of(**id), id.raw()))
            .unwrap(),
    };
    let redirect = |id: NodeId| if group.contains(&id) { kept } else { id };
    let scratch: Vec<Node> = d
        .nodes()
        .iter()
        .map(|n| Node::new(n.index, redirect(n.lo), redirect(n.hi)))
        .collect();
    let merged = Diagram::compact(d.num_vars(), &scratch, redirect(d.root()));
    let after = cost_report(&merged).total;
    let formula = -group
        .iter()
        .filter(|id| **id != kept)
        .map(|id| before.of(*id) as i64)
        .sum::<i64>();
    Ok((
        merged,
        MergeCheck {
            kept,
            before: before.total,
            after,
            delta: after as i64 - before.total as i64,
            formula,
        },
    ))
}

/// Local geometry around a redundant node `N` at level `l` whose edges both
/// reach `M` at level `l + k`, and the resulting bounds on the change of
/// `C_t` when `N` is deleted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeletionBound {
    pub l: Level,
    pub k: u32,
    /// `M`'s lowest child is at `l + k + z`; `None` when `M` is a terminal.
    pub z: Option<u32>,
    /// `M`'s deepest parent other than `N` is at `l + k - q`.
    pub q: Option<u32>,
    /// Parent `i` of `N` is at `l - g[i]`.
    pub g: Vec<u32>,
    /// Parent `i`'s own deepest parent is at `l - g[i] - h[i]` (`-1` for
    /// the root).
    pub h: Vec<u32>,
    /// Parent `i`'s other child is at `l - g[i] + j[i]`.
    pub j: Vec<u32>,
    pub r: usize,
    /// `-min(g) - k - 1`.
    pub lower: i64,
    /// `k (r - 1) + 1`.
    pub upper: i64,
    /// `-(min(g) + k - 1)`, i.e. minus the size of `N`'s own range: the
    /// largest possible decrease.
    pub tight_lower: i64,
}

impl DeletionBound {
    pub fn contains(&self, delta: i64) -> bool {
        self.lower <= delta && delta <= self.upper
    }

    pub fn tight_contains(&self, delta: i64) -> bool {
        self.tight_lower <= delta && delta <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeleteCheck {
    pub before: u64,
    pub after: u64,
    pub delta: i64,
    pub bound: DeletionBound,
}

fn deletion_bound(d: &Diagram, id: NodeId) -> DeletionBound {
    let node = d.node(id);
    let l = node.index;
    let m = node.lo;
    let lm = d.level(m);
    let k = lm - l;
    let max_parent = d.max_parent_levels();
    let z = (!m.is_terminal()).then(|| {
        let mn = d.node(m);
        d.level(mn.lo).min(d.level(mn.hi)) - lm
    });
    let q = d
        .parents_of(m)
        .into_iter()
        .filter(|&p| p != id)
        .map(|p| d.level(p))
        .max()
        .map(|lp| lm - lp);
    let (mut g, mut h, mut j) = (Vec::new(), Vec::new(), Vec::new());
    for p in d.parents_of(id) {
        let pn = d.node(p);
        let lp = pn.index;
        g.push(l - lp);
        h.push(max_parent[p.slot().unwrap()].map_or(lp + 1, |pp| lp - pp));
        let other = if pn.lo == id { pn.hi } else { pn.lo };
        j.push(d.level(other) - lp);
    }
    let r = g.len();
    // without parents N is the root, whose parent level counts as -1
    let min_g = g.iter().copied().min().unwrap_or(l + 1) as i64;
    let k64 = k as i64;
    DeletionBound {
        l,
        k,
        z,
        q,
        g,
        h,
        j,
        r,
        lower: -min_g - k64 - 1,
        upper: k64 * (r as i64 - 1) + 1,
        tight_lower: -(min_g + k64 - 1),
    }
}

/// Deletes the redundant node `id` (edges into it are redirected to its
/// child) and measures the change of `C_t` against the deletion bounds.
pub fn check_delete_delta(d: &Diagram, id: NodeId) -> Result<(Diagram, DeleteCheck)> {
    let node = d.try_node(id)?;
    if !node.is_redundant() {
        return Err(BddError::RuleNotApplicable(format!(
            "{id} is not redundant"
        )));
    }
    let before = cost_report(d).total;
    let bound = deletion_bound(d, id);
    let redirect = |c: NodeId| if c == id { node.lo } else { c };
    let scratch: Vec<Node> = d
        .nodes()
        .iter()
        .map(|n| Node::new(n.index, redirect(n.lo), redirect(n.hi)))
        .collect();
    let out = Diagram::compact(d.num_vars(), &scratch, redirect(d.root()));
    let after = cost_report(&out).total;
    Ok((
        out,
        DeleteCheck {
            before,
            after,
            delta: after as i64 - before as i64,
            bound,
        },
    ))
}
