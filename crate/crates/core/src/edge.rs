//! Recovery of corrupted edges from a trusted depth-first node vector and
//! the unique table.
//!
//! The vector lists every reachable node, terminals included, in depth-first
//! order with the 0-edge explored first. A node at position `p` has its
//! 0-child at position at most `p + 1` and its 1-child at position at most
//! `p + |B_0| + 1`, where `B_0` is the subgraph under the 0-child. The lost
//! child is searched among earlier positions with a deeper level, probing
//! the unique table for the node's own id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::fault::{inject, Component, FaultOverlay};
use crate::node::NodeId;
use crate::unique::UniqueTable;

/// Depth-first, 0-edge-first linearization of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeVector {
    order: Vec<NodeId>,
    internal_pos: Vec<usize>,
    terminal_pos: [Option<usize>; 2],
}

impl NodeVector {
    pub fn build(d: &Diagram) -> Self {
        let mut order = Vec::with_capacity(d.count_nodes() + 2);
        let mut internal_pos = vec![usize::MAX; d.count_nodes()];
        let mut terminal_pos = [None; 2];
        let mut stack = vec![d.root()];
        while let Some(id) = stack.pop() {
            match id.slot() {
                None => {
                    let t = &mut terminal_pos[id.terminal_value().unwrap() as usize];
                    if t.is_none() {
                        *t = Some(order.len());
                        order.push(id);
                    }
                }
                Some(s) => {
                    if internal_pos[s] != usize::MAX {
                        continue;
                    }
                    internal_pos[s] = order.len();
                    order.push(id);
                    let n = d.node(id);
                    stack.push(n.hi);
                    stack.push(n.lo);
                }
            }
        }
        NodeVector {
            order,
            internal_pos,
            terminal_pos,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        match id.slot() {
            None => self.terminal_pos[id.terminal_value().unwrap() as usize],
            Some(s) => self
                .internal_pos
                .get(s)
                .copied()
                .filter(|p| *p != usize::MAX),
        }
    }
}

/// Highest vector position the `edge`-child of `id` can occupy.
pub fn child_bound(d: &Diagram, v: &NodeVector, id: NodeId, edge: bool) -> Result<usize> {
    let node = d.try_node(id)?;
    let p = v.position(id).ok_or(BddError::UnknownNode(id))?;
    Ok(if edge {
        p + d.subgraph_size(node.lo) + 1
    } else {
        p + 1
    })
}

/// Nodes at positions `0..=bound` lying strictly below `id`, in position
/// order.
pub fn candidate_set(d: &Diagram, v: &NodeVector, id: NodeId, bound: usize) -> Vec<NodeId> {
    let level = d.level(id);
    v.order
        .iter()
        .take(bound + 1)
        .copied()
        .filter(|&c| d.level(c) > level)
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeMode {
    /// Return the first matching candidate.
    #[default]
    Fast,
    /// Check every candidate and refuse to choose between several matches.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeVerdict {
    Child(NodeId),
    Ambiguous(Vec<NodeId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecovery {
    pub verdict: EdgeVerdict,
    pub candidates: usize,
    /// Unique-table lookups performed.
    pub probes: usize,
}

impl EdgeRecovery {
    pub fn child(&self, node: NodeId) -> Result<NodeId> {
        match &self.verdict {
            EdgeVerdict::Child(c) => Ok(*c),
            EdgeVerdict::Ambiguous(all) => Err(BddError::AmbiguousEdge {
                node,
                count: all.len(),
            }),
        }
    }
}

/// Rebuilds the `edge`-child of `id`. Only the named edge may be corrupt;
/// the other edge, the level of `id`, the vector and the table are trusted.
///
/// A candidate matches when probing the subtable of `id`'s level with the
/// key it would form finds `id`. A wrong candidate matches exactly when its
/// key falls in the same bucket as the true key, so fast mode can return a
/// wrong child; strict mode reports ambiguity instead.
pub fn reconstruct_edge(
    d: &Diagram,
    table: &UniqueTable,
    v: &NodeVector,
    id: NodeId,
    edge: bool,
    mode: EdgeMode,
) -> Result<EdgeRecovery> {
    let node = d.try_node(id)?;
    let bound = child_bound(d, v, id, edge)?;
    let candidates = candidate_set(d, v, id, bound);
    let key = |c: NodeId| if edge { (node.lo, c) } else { (c, node.hi) };
    let mut matches = Vec::new();
    let mut probes = 0;
    for &c in &candidates {
        probes += 1;
        let (lo, hi) = key(c);
        if table.probe(node.index, lo, hi, id) {
            matches.push(c);
            if mode == EdgeMode::Fast {
                break;
            }
        }
    }
    let verdict = match matches.len() {
        0 => return Err(BddError::EdgeNotFound(id)),
        1 => EdgeVerdict::Child(matches[0]),
        _ => EdgeVerdict::Ambiguous(matches),
    };
    Ok(EdgeRecovery {
        verdict,
        candidates: candidates.len(),
        probes,
    })
}

/// Aggregated outcome of an edge campaign at one bucket count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignStats {
    pub table_size: usize,
    pub trials: usize,
    pub successes: usize,
    pub ambiguous: usize,
    pub wrong: usize,
    pub mean_candidate_ratio: f64,
    pub mean_probe_ratio: f64,
}

impl CampaignStats {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Runs `trials` corrupt/reconstruct/restore rounds for each table size.
/// Every size replays the same seeded sequence of faults, so the rates are
/// directly comparable. Ratios are relative to the diagram size with
/// terminals.
pub fn edge_campaign(
    d: &Diagram,
    table_sizes: &[usize],
    trials: usize,
    seed: u64,
    mode: EdgeMode,
) -> Result<Vec<CampaignStats>> {
    let v = NodeVector::build(d);
    let size = d.size_with_terminals() as f64;
    let mut out = Vec::with_capacity(table_sizes.len());
    for &buckets in table_sizes {
        let table = UniqueTable::from_diagram(d, buckets);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut work = d.clone();
        let mut overlay = FaultOverlay::new(&work);
        let mut stats = CampaignStats {
            table_size: buckets,
            trials: 0,
            successes: 0,
            ambiguous: 0,
            wrong: 0,
            mean_candidate_ratio: 0.0,
            mean_probe_ratio: 0.0,
        };
        if d.count_nodes() > 0 {
            for _ in 0..trials {
                let id = NodeId::from_raw(rng.random_range(2..d.count_nodes() as u32 + 2));
                let edge = rng.random_bool(0.5);
                let comp = Component::edge(edge);
                let truth = d.node(id).child(edge);
                inject(&mut work, &mut overlay, id, comp, &mut rng)?;
                let rec = reconstruct_edge(&work, &table, &v, id, edge, mode)?;
                match rec.verdict {
                    EdgeVerdict::Child(c) if c == truth => stats.successes += 1,
                    EdgeVerdict::Child(c) => {
                        stats.wrong += 1;
                        log::debug!(
                            "wrong child {c} for {id} edge {}: buckets {} vs {}",
                            edge as u8,
                            bucket_of_choice(d, &table, id, edge, c),
                            bucket_of_choice(d, &table, id, edge, truth)
                        );
                    }
                    EdgeVerdict::Ambiguous(_) => stats.ambiguous += 1,
                }
                stats.trials += 1;
                stats.mean_candidate_ratio += rec.candidates as f64 / size;
                stats.mean_probe_ratio += rec.probes as f64 / size;
                // restore
                *work.node_mut(id) = d.node(id);
                overlay.clear(id, comp);
            }
        }
        if stats.trials > 0 {
            stats.mean_candidate_ratio /= stats.trials as f64;
            stats.mean_probe_ratio /= stats.trials as f64;
        }
        debug_assert!(overlay.is_clean());
        out.push(stats);
    }
    Ok(out)
}

fn bucket_of_choice(d: &Diagram, t: &UniqueTable, id: NodeId, edge: bool, c: NodeId) -> usize {
    let n = d.node(id);
    if edge {
        t.bucket_of(n.lo, c)
    } else {
        t.bucket_of(c, n.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, edge_sample_id};
    use crate::node::Node;

    const T0: NodeId = NodeId::TERM0;
    const T1: NodeId = NodeId::TERM1;

    #[test]
    fn edge_sample_vector_order() {
        let d = fixtures::edge_sample();
        let v = NodeVector::build(&d);
        let names: String = v
            .order()
            .iter()
            .map(|&id| match id.terminal_value() {
                Some(false) => '0',
                Some(true) => '1',
                None => (b'a' + (id.slot().unwrap() as u8)) as char,
            })
            .collect();
        assert_eq!(names, "abc1de0fgh");
        assert_eq!(NodeVector::build(&d), v);
    }

    #[test]
    fn single_node_vector() {
        let d = Diagram::var(1, 0).unwrap();
        let v = NodeVector::build(&d);
        assert_eq!(v.order(), &[d.root(), T0, T1]);
    }

    #[test]
    fn edge_sample_child_bounds() {
        let d = fixtures::edge_sample();
        let v = NodeVector::build(&d);
        assert_eq!(child_bound(&d, &v, edge_sample_id('b'), false).unwrap(), 2);
        assert_eq!(child_bound(&d, &v, edge_sample_id('b'), true).unwrap(), 7);
        assert_eq!(child_bound(&d, &v, edge_sample_id('f'), false).unwrap(), 8);
        assert_eq!(child_bound(&d, &v, edge_sample_id('c'), true).unwrap(), 4);
    }

    #[test]
    fn edge_sample_candidates_of_c_one_edge() {
        let d = fixtures::edge_sample();
        let v = NodeVector::build(&d);
        let c = edge_sample_id('c');
        // oracle: positions 0..=4 are a, b, c, T1, d; keep levels above 2
        let oracle: Vec<NodeId> = v.order()[..=4]
            .iter()
            .copied()
            .filter(|&x| d.level(x) > 2)
            .collect();
        let got = candidate_set(&d, &v, c, 4);
        assert_eq!(got, oracle);
        assert_eq!(got, vec![T1, edge_sample_id('d')]);
    }

    #[test]
    fn root_zero_edge_candidates() {
        let d = fixtures::edge_sample();
        let v = NodeVector::build(&d);
        let s = candidate_set(&d, &v, d.root(), 1);
        assert!(s.len() <= 1);
    }

    #[test]
    fn recover_c_one_edge() {
        let d = fixtures::edge_sample();
        let table = UniqueTable::from_diagram(&d, 256);
        let v = NodeVector::build(&d);
        let c = edge_sample_id('c');
        let (b0, b1) = (
            table.bucket_of(T1, T1),
            table.bucket_of(T1, edge_sample_id('d')),
        );
        assert_ne!(b0, b1);
        for mode in [EdgeMode::Fast, EdgeMode::Strict] {
            let r = reconstruct_edge(&d, &table, &v, c, true, mode).unwrap();
            assert_eq!(r.verdict, EdgeVerdict::Child(edge_sample_id('d')));
        }
    }

    #[test]
    fn single_bucket_collision_fools_fast_mode_only() {
        // n = [1, T0, x]: T1, T0 and x all precede the bound and share the
        // only bucket, so T1 is tried first and wrongly accepted
        let s = |k| NodeId::from_slot(k);
        let d = Diagram::from_parts(
            3,
            vec![
                Node::new(0, s(1), s(2)),
                Node::new(1, T1, T0),
                Node::new(1, T0, s(3)),
                Node::new(2, T0, T1),
            ],
            s(0),
        )
        .unwrap();
        let v = NodeVector::build(&d);
        let n = s(2);
        let table = UniqueTable::from_diagram(&d, 1);
        let fast = reconstruct_edge(&d, &table, &v, n, true, EdgeMode::Fast).unwrap();
        assert_eq!(fast.verdict, EdgeVerdict::Child(T1));
        let strict = reconstruct_edge(&d, &table, &v, n, true, EdgeMode::Strict).unwrap();
        assert!(matches!(strict.verdict, EdgeVerdict::Ambiguous(ref m) if m.contains(&s(3))));
        assert!(matches!(
            strict.child(n),
            Err(BddError::AmbiguousEdge { .. })
        ));
        let wide = UniqueTable::from_diagram(&d, 1 << 16);
        let ok = reconstruct_edge(&d, &wide, &v, n, true, EdgeMode::Fast).unwrap();
        assert_eq!(ok.verdict, EdgeVerdict::Child(s(3)));
    }

    #[test]
    fn bounds_and_candidates_hold_everywhere() {
        for d in [
            fixtures::small_robdd(),
            fixtures::edge_sample(),
            fixtures::parity(5),
            fixtures::merge_after_chains(),
        ] {
            let v = NodeVector::build(&d);
            for (id, node) in d.iter() {
                for edge in [false, true] {
                    let l = child_bound(&d, &v, id, edge).unwrap();
                    let child = node.child(edge);
                    assert!(v.position(child).unwrap() <= l);
                    assert!(candidate_set(&d, &v, id, l).contains(&child));
                }
            }
        }
    }

    #[test]
    fn campaign_is_deterministic_and_monotone() {
        let d = fixtures::edge_sample();
        let a = edge_campaign(&d, &[1, 2, 256], 300, 11, EdgeMode::Fast).unwrap();
        let b = edge_campaign(&d, &[1, 2, 256], 300, 11, EdgeMode::Fast).unwrap();
        assert_eq!(a, b);
        assert!(a[0].successes <= a[1].successes && a[1].successes <= a[2].successes);
        assert!(a[0].wrong > 0);
        let strict = edge_campaign(&d, &[1], 300, 11, EdgeMode::Strict).unwrap();
        assert_eq!(strict[0].wrong, 0);
        assert!(strict[0].ambiguous > 0);
    }

    #[test]
    fn empty_campaign() {
        let s = edge_campaign(&fixtures::edge_sample(), &[256], 0, 1, EdgeMode::Fast).unwrap();
        assert_eq!(s[0].trials, 0);
        assert_eq!(s[0].success_rate(), 0.0);
    }
}
