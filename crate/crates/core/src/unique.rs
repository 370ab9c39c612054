//! Per-level unique table: one hash subtable per variable, keyed by the child
//! pair of a node. Each bucket holds a collision list of node ids.
//!
//! The hash is 64-bit FNV-1a over the raw child ids, reduced modulo the
//! bucket count. It is fixed so that fault campaigns are reproducible.

use crate::diagram::Diagram;
use crate::node::{Level, Node, NodeId};

pub const DEFAULT_BUCKETS: usize = 256;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the little-endian bytes of `lo` then `hi`.
pub fn fnv1a_pair(lo: NodeId, hi: NodeId) -> u64 {
    let mut h = FNV_OFFSET;
    for b in lo
        .raw()
        .to_le_bytes()
        .into_iter()
        .chain(hi.raw().to_le_bytes())
    {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

#[derive(Clone, Debug)]
pub struct UniqueTable {
    buckets: usize,
    subtables: Vec<Vec<Vec<NodeId>>>,
    len: usize,
}

impl UniqueTable {
    pub fn new(num_vars: u32, buckets: usize) -> Self {
        assert!(buckets > 0, "unique table needs at least one bucket");
        UniqueTable {
            buckets,
            subtables: (0..num_vars).map(|_| vec![Vec::new(); buckets]).collect(),
            len: 0,
        }
    }

    /// Registers every internal node of `d` at its stored level.
    pub fn from_diagram(d: &Diagram, buckets: usize) -> Self {
        let mut table = UniqueTable::new(d.num_vars(), buckets);
        for (id, node) in d.iter() {
            table.insert(node.index, node.lo, node.hi, id);
        }
        table
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets
    }

    pub fn num_levels(&self) -> usize {
        self.subtables.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bucket_of(&self, lo: NodeId, hi: NodeId) -> usize {
        (fnv1a_pair(lo, hi) % self.buckets as u64) as usize
    }

    /// Collision list of subtable `level` at `bucket`.
    pub fn bucket(&self, level: Level, bucket: usize) -> &[NodeId] {
        &self.subtables[level as usize][bucket]
    }

    pub fn insert(&mut self, level: Level, lo: NodeId, hi: NodeId, id: NodeId) {
        let b = self.bucket_of(lo, hi);
        self.subtables[level as usize][b].push(id);
        self.len += 1;
    }

    /// Removes `id` from the list it was registered in. Returns whether it
    /// was present.
    pub fn remove(&mut self, level: Level, lo: NodeId, hi: NodeId, id: NodeId) -> bool {
        let b = self.bucket_of(lo, hi);
        let list = &mut self.subtables[level as usize][b];
        match list.iter().position(|&x| x == id) {
            Some(pos) => {
                list.swap_remove(pos);
                self.len -= 1;
                true
            }
            None => false,
        }
    }

    /// Hash-consing lookup: the node of `level` whose stored children are
    /// exactly `(lo, hi)`. `node_of` resolves ids to stored nodes.
    pub fn find(
        &self,
        level: Level,
        lo: NodeId,
        hi: NodeId,
        node_of: impl Fn(NodeId) -> Node,
    ) -> Option<NodeId> {
        let b = self.bucket_of(lo, hi);
        self.subtables[level as usize][b]
            .iter()
            .copied()
            .find(|&id| {
                let n = node_of(id);
                n.lo == lo && n.hi == hi
            })
    }

    /// Walks the collision list for `(lo, hi)` in subtable `level` looking
    /// for `target`. This is the probe used by index and edge recovery.
    pub fn probe(&self, level: Level, lo: NodeId, hi: NodeId, target: NodeId) -> bool {
        let b = self.bucket_of(lo, hi);
        self.subtables[level as usize][b].contains(&target)
    }
}
