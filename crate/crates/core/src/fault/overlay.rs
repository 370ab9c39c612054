use rand::seq::index::sample;
use rand::Rng;

use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::node::NodeId;

/// One field of a node record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Index,
    Lo,
    Hi,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Index, Component::Lo, Component::Hi];

    fn bit(self) -> u8 {
        match self {
            Component::Index => 1,
            Component::Lo => 2,
            Component::Hi => 4,
        }
    }

    pub fn edge(value: bool) -> Self {
        if value {
            Component::Hi
        } else {
            Component::Lo
        }
    }
}

/// Corruption flags for every internal node of one diagram. A component is
/// reported corrupt exactly when its flag is set; terminals are never
/// corrupt.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultOverlay {
    flags: Vec<u8>,
}

impl FaultOverlay {
    pub fn new(d: &Diagram) -> Self {
        FaultOverlay {
            flags: vec![0; d.count_nodes()],
        }
    }

    pub fn is_corrupt(&self, id: NodeId, comp: Component) -> bool {
        id.slot()
            .and_then(|s| self.flags.get(s))
            .is_some_and(|f| f & comp.bit() != 0)
    }

    pub(crate) fn mark(&mut self, id: NodeId, comp: Component) {
        if let Some(s) = id.slot() {
            self.flags[s] |= comp.bit();
        }
    }

    pub fn clear(&mut self, id: NodeId, comp: Component) {
        if let Some(s) = id.slot() {
            self.flags[s] &= !comp.bit();
        }
    }

    /// Every flagged `(node, component)` pair, by node id.
    pub fn corrupted(&self) -> Vec<(NodeId, Component)> {
        let mut out = Vec::new();
        for (s, f) in self.flags.iter().enumerate() {
            for c in Component::ALL {
                if f & c.bit() != 0 {
                    out.push((NodeId::from_slot(s), c));
                }
            }
        }
        out
    }

    pub fn count(&self, comp: Component) -> usize {
        self.flags.iter().filter(|f| *f & comp.bit() != 0).count()
    }

    pub fn is_clean(&self) -> bool {
        self.flags.iter().all(|f| *f == 0)
    }
}

/// Corrupts one component of an internal node: the stored value is replaced
/// by a random value of the right type that differs from the true one, and
/// the flag is raised.
pub fn inject(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    id: NodeId,
    comp: Component,
    rng: &mut impl Rng,
) -> Result<()> {
    if id.is_terminal() {
        return Err(BddError::Terminal(id));
    }
    d.try_node(id)?;
    if overlay.is_corrupt(id, comp) {
        return Err(BddError::Contract(format!(
            "{comp:?} of {id} is already corrupted"
        )));
    }
    let n = d.num_vars();
    let ids = d.count_nodes() as u32 + 2;
    let node = d.node_mut(id);
    match comp {
        Component::Index => {
            node.index = if n == 1 {
                1
            } else {
                let l = rng.random_range(0..n - 1);
                if l >= node.index {
                    l + 1
                } else {
                    l
                }
            };
        }
        Component::Lo | Component::Hi => {
            let slot = if comp == Component::Lo {
                &mut node.lo
            } else {
                &mut node.hi
            };
            let r = rng.random_range(0..ids - 1);
            *slot = NodeId::from_raw(if r >= slot.raw() { r + 1 } else { r });
        }
    }
    overlay.mark(id, comp);
    Ok(())
}

/// Corrupts the index of `count` distinct random internal nodes (all of them
/// when `count` exceeds the node count). Returns the victims.
pub fn inject_random_indices(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<NodeId> {
    let m = d.count_nodes();
    let mut victims: Vec<NodeId> = sample(rng, m, count.min(m))
        .into_iter()
        .map(NodeId::from_slot)
        .filter(|id| !overlay.is_corrupt(*id, Component::Index))
        .collect();
    victims.sort();
    for &v in &victims {
        inject(d, overlay, v, Component::Index, rng).expect("victim is an internal node");
    }
    victims
}
