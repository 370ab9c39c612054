use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::fault::{Component, FaultOverlay};
use crate::node::{Level, NodeId};
use crate::unique::UniqueTable;

/// Parents of every internal node, from one sweep over the (intact) edges.
#[derive(Clone, Debug)]
pub struct ParentMap {
    parents: Vec<Vec<NodeId>>,
}

impl ParentMap {
    pub fn new(d: &Diagram) -> Self {
        let mut parents = vec![Vec::new(); d.count_nodes()];
        for (p, n) in d.iter() {
            for c in [n.lo, n.hi] {
                if let Some(s) = c.slot() {
                    if parents[s].last() != Some(&p) {
                        parents[s].push(p);
                    }
                }
            }
        }
        ParentMap { parents }
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        id.slot().map_or(&[], |s| &self.parents[s])
    }
}

/// Candidate levels `[lower, upper]` for a node whose index is lost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRange {
    pub lower: Level,
    pub upper: Level,
    /// Some neighbour level was unusable, so the range is wider than it
    /// would be in a fault-free diagram.
    pub widened: bool,
}

impl NodeRange {
    /// Every variable level.
    pub fn full(num_vars: u32) -> Self {
        NodeRange {
            lower: 0,
            upper: num_vars.saturating_sub(1),
            widened: true,
        }
    }

    pub fn len(&self) -> u32 {
        (self.upper + 1).saturating_sub(self.lower)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, level: Level) -> bool {
        self.lower <= level && level <= self.upper
    }
}

/// `[max parent level + 1, min child level - 1]`, with `-1` as the parent
/// level of the root and `n` as the level of terminals. Neighbours whose
/// index is flagged corrupt are skipped, which can only widen the range.
pub fn node_range(
    d: &Diagram,
    parents: &ParentMap,
    overlay: &FaultOverlay,
    id: NodeId,
) -> Result<NodeRange> {
    range_with(d, parents, id, |x| !overlay.is_corrupt(x, Component::Index))
}

/// Same as [`node_range`] but trusting every stored neighbour index, as a
/// detector-less implementation would. Under multiple faults the result may
/// exclude the true level or be empty.
pub fn node_range_naive(d: &Diagram, parents: &ParentMap, id: NodeId) -> Result<NodeRange> {
    range_with(d, parents, id, |_| true)
}

fn range_with(
    d: &Diagram,
    parents: &ParentMap,
    id: NodeId,
    usable: impl Fn(NodeId) -> bool,
) -> Result<NodeRange> {
    let node = d.try_node(id)?;
    let mut widened = false;
    let mut max_parent: Option<Level> = None;
    for &p in parents.parents(id) {
        if usable(p) {
            let l = d.level(p);
            max_parent = Some(max_parent.map_or(l, |m| m.max(l)));
        } else {
            widened = true;
        }
    }
    let mut min_child = d.num_vars();
    for c in [node.lo, node.hi] {
        if usable(c) {
            min_child = min_child.min(d.level(c));
        } else {
            widened = true;
        }
    }
    Ok(NodeRange {
        lower: max_parent.map_or(0, |l| l + 1),
        upper: min_child.saturating_sub(1),
        widened,
    })
}

/// Scans the range from the top level down, probing subtable `l` at the
/// bucket of `(lo, hi)` for `id` itself. `None` means no level matched,
/// which cannot happen when `id` is the only fault and the range is right.
pub fn reconstruct_index_ut(
    d: &Diagram,
    table: &UniqueTable,
    range: NodeRange,
    id: NodeId,
) -> Option<Level> {
    let node = d.node(id);
    if range.is_empty() {
        return None;
    }
    (range.lower..=range.upper)
        .rev()
        .find(|&l| (l as usize) < table.num_levels() && table.probe(l, node.lo, node.hi, id))
}

/// Restores the index of `id`: node range first, whole level span on a miss.
/// The recovered level is written back and the flag cleared.
pub fn recover_index_ut(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    table: &UniqueTable,
    parents: &ParentMap,
    id: NodeId,
) -> Result<Level> {
    let range = node_range(d, parents, overlay, id)?;
    let level = reconstruct_index_ut(d, table, range, id)
        .or_else(|| reconstruct_index_ut(d, table, NodeRange::full(d.num_vars()), id))
        .ok_or(BddError::IndexNotFound(id))?;
    d.node_mut(id).index = level;
    overlay.clear(id, Component::Index);
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::inject;
    use crate::fixtures::{self, small_robdd_id};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn range_of(letter: char) -> (Level, Level) {
        let d = fixtures::small_robdd();
        let r = node_range(
            &d,
            &ParentMap::new(&d),
            &FaultOverlay::new(&d),
            small_robdd_id(letter),
        )
        .unwrap();
        (r.lower, r.upper)
    }

    #[test]
    fn small_robdd_ranges() {
        assert_eq!(range_of('c'), (1, 3));
        assert_eq!(range_of('f'), (4, 4));
        assert_eq!(range_of('a'), (0, 0));
    }

    fn corrupt_and_recover(letter: char, seed: u64) -> Level {
        let mut d = fixtures::small_robdd();
        let table = UniqueTable::from_diagram(&d, 256);
        let parents = ParentMap::new(&d);
        let mut ov = FaultOverlay::new(&d);
        let id = small_robdd_id(letter);
        inject(
            &mut d,
            &mut ov,
            id,
            Component::Index,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        let l = recover_index_ut(&mut d, &mut ov, &table, &parents, id).unwrap();
        assert!(ov.is_clean());
        l
    }

    #[test]
    fn small_robdd_single_fault_recovery() {
        for seed in 0..20 {
            assert_eq!(corrupt_and_recover('c', seed), 1);
            assert_eq!(corrupt_and_recover('f', seed), 4);
            assert_eq!(corrupt_and_recover('d', seed), 2);
        }
    }

    #[test]
    fn scan_of_c_passes_a_same_pointer_node_at_level_3() {
        // e = [3, T0, f] has the same pointers as c = [1, T0, f]
        let d = fixtures::small_robdd();
        let table = UniqueTable::from_diagram(&d, 256);
        let (c, e) = (small_robdd_id('c'), small_robdd_id('e'));
        assert!(table.probe(3, NodeId::TERM0, small_robdd_id('f'), e));
        assert!(!table.probe(3, NodeId::TERM0, small_robdd_id('f'), c));
        let r = NodeRange {
            lower: 1,
            upper: 3,
            widened: false,
        };
        assert_eq!(reconstruct_index_ut(&d, &table, r, c), Some(1));
        let wrong = NodeRange {
            lower: 2,
            upper: 3,
            widened: false,
        };
        assert_eq!(reconstruct_index_ut(&d, &table, wrong, c), None);
    }

    #[test]
    fn corrupted_neighbours_widen_the_range() {
        let mut d = fixtures::small_robdd();
        let parents = ParentMap::new(&d);
        let mut ov = FaultOverlay::new(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, c, f) = (
            small_robdd_id('a'),
            small_robdd_id('c'),
            small_robdd_id('f'),
        );
        inject(&mut d, &mut ov, c, Component::Index, &mut rng).unwrap();
        inject(&mut d, &mut ov, f, Component::Index, &mut rng).unwrap();
        let r = node_range(&d, &parents, &ov, c).unwrap();
        assert!(r.widened);
        assert_eq!((r.lower, r.upper), (1, 4));
        // a's true level is still bracketed when its child c is skipped
        inject(&mut d, &mut ov, a, Component::Index, &mut rng).unwrap();
        let ra = node_range(&d, &parents, &ov, small_robdd_id('b')).unwrap();
        assert!(ra.contains(1));
    }

    #[test]
    fn naive_range_can_miss_and_full_retry_recovers() {
        let mut d = fixtures::small_robdd();
        let table = UniqueTable::from_diagram(&d, 256);
        let parents = ParentMap::new(&d);
        let (a, c) = (small_robdd_id('a'), small_robdd_id('c'));
        // a scrambled to level 3 and c lost: the naive range of c is empty
        d.node_mut(a).index = 3;
        d.node_mut(c).index = 0;
        let naive = node_range_naive(&d, &parents, c).unwrap();
        assert_eq!(reconstruct_index_ut(&d, &table, naive, c), None);
        let full = NodeRange::full(5);
        assert_eq!(reconstruct_index_ut(&d, &table, full, c), Some(1));
        assert_eq!(reconstruct_index_ut(&d, &table, full, a), Some(0));
    }

    #[test]
    fn parent_map_of_small_robdd() {
        let d = fixtures::small_robdd();
        let pm = ParentMap::new(&d);
        let mut pf = pm.parents(small_robdd_id('f')).to_vec();
        pf.sort();
        assert_eq!(pf, vec![small_robdd_id('c'), small_robdd_id('e')]);
        assert!(pm.parents(small_robdd_id('a')).is_empty());
    }
}
