//! Binary Boolean operators via the recursive Apply procedure with a
//! memoization table over node pairs.

use std::collections::HashMap;
use std::fmt;

use crate::builder::{Builder, ReduceMode};
use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::node::NodeId;
use crate::ops::reduce_robdd;

/// A binary Boolean operator given by its truth table.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolOp {
    // bit (2*a + b) holds op(a, b)
    table: u8,
}

impl BoolOp {
    pub const AND: BoolOp = BoolOp::from_bits(0b1000);
    pub const OR: BoolOp = BoolOp::from_bits(0b1110);
    pub const XOR: BoolOp = BoolOp::from_bits(0b0110);
    pub const NAND: BoolOp = BoolOp::from_bits(0b0111);
    pub const NOR: BoolOp = BoolOp::from_bits(0b0001);
    pub const XNOR: BoolOp = BoolOp::from_bits(0b1001);
    /// a → b
    pub const IMPLIES: BoolOp = BoolOp::from_bits(0b1011);
    /// a ∧ ¬b
    pub const DIFF: BoolOp = BoolOp::from_bits(0b0100);

    pub const ALL_NAMED: [BoolOp; 8] = [
        BoolOp::AND,
        BoolOp::OR,
        BoolOp::XOR,
        BoolOp::NAND,
        BoolOp::NOR,
        BoolOp::XNOR,
        BoolOp::IMPLIES,
        BoolOp::DIFF,
    ];

    /// Operator from its four outputs, `bits & (1 << (2a + b))` being
    /// `op(a, b)`. Only the low four bits are used.
    pub const fn from_bits(bits: u8) -> Self {
        BoolOp { table: bits & 0xf }
    }

    pub fn from_fn(f: impl Fn(bool, bool) -> bool) -> Self {
        let mut bits = 0;
        for a in [false, true] {
            for b in [false, true] {
                if f(a, b) {
                    bits |= 1 << (2 * a as u8 + b as u8);
                }
            }
        }
        BoolOp::from_bits(bits)
    }

    pub fn bits(self) -> u8 {
        self.table
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        self.table >> (2 * a as u8 + b as u8) & 1 == 1
    }

    pub fn name(self) -> Option<&'static str> {
        Some(match self {
            BoolOp::AND => "and",
            BoolOp::OR => "or",
            BoolOp::XOR => "xor",
            BoolOp::NAND => "nand",
            BoolOp::NOR => "nor",
            BoolOp::XNOR => "xnor",
            BoolOp::IMPLIES => "implies",
            BoolOp::DIFF => "diff",
            _ => return None,
        })
    }

    /// The result is fixed once one operand is the terminal `value` in the
    /// given position, regardless of the other operand.
    pub fn absorbs(self, value: bool, left: bool) -> Option<bool> {
        let (r0, r1) = if left {
            (self.eval(value, false), self.eval(value, true))
        } else {
            (self.eval(false, value), self.eval(true, value))
        };
        (r0 == r1).then_some(r0)
    }
}

impl fmt::Debug for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(n) => write!(f, "BoolOp::{}", n.to_uppercase()),
            None => write!(f, "BoolOp({:04b})", self.table),
        }
    }
}

/// Backing store of the Apply memo table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MemoKind {
    /// Dense matrix for small operand products, hash map otherwise.
    #[default]
    Auto,
    Hash,
    Dense,
    /// No memoization: exponential in the worst case, for cross-checks only.
    Disabled,
}

/// Operand products up to this many cells use the dense matrix under
/// [`MemoKind::Auto`].
pub const DENSE_MEMO_LIMIT: usize = 1 << 20;

/// Result of a memo lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoLookup {
    Miss,
    Hit(NodeId),
    /// The entry exists but is flagged as corrupted; its value must not be used.
    Corrupt,
}

#[derive(Clone, Copy, Debug)]
struct MemoEntry {
    value: NodeId,
    corrupt: bool,
}

#[derive(Clone, Debug)]
enum Backing {
    Hash(HashMap<(NodeId, NodeId), MemoEntry>),
    Dense {
        cols: usize,
        cells: Vec<Option<MemoEntry>>,
    },
    Disabled,
}

/// The memo table M_A: operand pair to result node. Entries carry a
/// corruption flag so that faulty entries are detected and recomputed.
#[derive(Clone, Debug)]
pub struct MemoTable {
    backing: Backing,
    len: usize,
}

impl MemoTable {
    /// Sized for operands with `rows` and `cols` ids (terminals included).
    pub fn new(kind: MemoKind, rows: usize, cols: usize) -> Self {
        let cells = rows.saturating_mul(cols);
        let backing = match kind {
            MemoKind::Disabled => Backing::Disabled,
            MemoKind::Dense => Backing::Dense {
                cols,
                cells: vec![None; cells],
            },
            MemoKind::Auto if cells <= DENSE_MEMO_LIMIT => Backing::Dense {
                cols,
                cells: vec![None; cells],
            },
            MemoKind::Auto | MemoKind::Hash => {
                Backing::Hash(HashMap::with_capacity(cells.min(1 << 16)))
            }
        };
        MemoTable { backing, len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn cell(&mut self, key: (NodeId, NodeId)) -> Option<&mut Option<MemoEntry>> {
        match &mut self.backing {
            Backing::Dense { cols, cells } => {
                cells.get_mut(key.0.raw() as usize * *cols + key.1.raw() as usize)
            }
            _ => None,
        }
    }

    pub fn get(&mut self, key: (NodeId, NodeId)) -> MemoLookup {
        let entry = match &self.backing {
            Backing::Disabled => None,
            Backing::Hash(map) => map.get(&key).copied(),
            Backing::Dense { .. } => self.cell(key).and_then(|c| *c),
        };
        match entry {
            None => MemoLookup::Miss,
            Some(e) if e.corrupt => MemoLookup::Corrupt,
            Some(e) => MemoLookup::Hit(e.value),
        }
    }

    pub fn insert(&mut self, key: (NodeId, NodeId), value: NodeId) {
        let entry = MemoEntry {
            value,
            corrupt: false,
        };
        let fresh = match &mut self.backing {
            Backing::Disabled => return,
            Backing::Hash(map) => map.insert(key, entry).is_none(),
            Backing::Dense { .. } => {
                let cell = self.cell(key).expect("memo key outside the dense matrix");
                cell.replace(entry).is_none()
            }
        };
        if fresh {
            self.len += 1;
        }
    }

    /// Overwrites the stored value of an existing entry with `scrambled` and
    /// flags it. Returns false when there is no entry to corrupt.
    pub fn corrupt(&mut self, key: (NodeId, NodeId), scrambled: NodeId) -> bool {
        let entry = match &mut self.backing {
            Backing::Disabled => None,
            Backing::Hash(map) => map.get_mut(&key),
            Backing::Dense { .. } => self.cell(key).and_then(|c| c.as_mut()),
        };
        match entry {
            Some(e) => {
                e.value = scrambled;
                e.corrupt = true;
                true
            }
            None => false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ApplyStats {
    /// Distinct recursive computations (pairs with at least one internal node).
    pub pairs_computed: usize,
    pub memo_hits: usize,
}

struct Standard<'a> {
    op: BoolOp,
    f: &'a Diagram,
    g: &'a Diagram,
    memo: MemoTable,
    out: Builder,
    stats: ApplyStats,
}

impl Standard<'_> {
    fn rec(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        if let (Some(x), Some(y)) = (a.terminal_value(), b.terminal_value()) {
            return Ok(NodeId::terminal(self.op.eval(x, y)));
        }
        if let MemoLookup::Hit(r) = self.memo.get((a, b)) {
            self.stats.memo_hits += 1;
            return Ok(r);
        }
        self.stats.pairs_computed += 1;
        let (la, lb) = (self.f.level(a), self.g.level(b));
        let top = la.min(lb);
        let (a0, a1) = if la == top {
            let n = self.f.node(a);
            (n.lo, n.hi)
        } else {
            (a, a)
        };
        let (b0, b1) = if lb == top {
            let n = self.g.node(b);
            (n.lo, n.hi)
        } else {
            (b, b)
        };
        let lo = self.rec(a0, b0)?;
        let hi = self.rec(a1, b1)?;
        let r = self.out.mk_node(top, lo, hi)?;
        self.memo.insert((a, b), r);
        Ok(r)
    }
}

/// `op(f, g)` as a canonical ROBDD.
pub fn apply(op: BoolOp, f: &Diagram, g: &Diagram) -> Result<Diagram> {
    apply_with(op, f, g, MemoKind::Auto).map(|(d, _)| d)
}

/// [`apply`] with an explicit memo backing, also reporting recursion counts.
pub fn apply_with(
    op: BoolOp,
    f: &Diagram,
    g: &Diagram,
    memo: MemoKind,
) -> Result<(Diagram, ApplyStats)> {
    if f.num_vars() != g.num_vars() {
        return Err(BddError::VarCountMismatch(f.num_vars(), g.num_vars()));
    }
    let mut ctx = Standard {
        op,
        f,
        g,
        memo: MemoTable::new(memo, f.count_nodes() + 2, g.count_nodes() + 2),
        out: Builder::new(f.num_vars(), ReduceMode::Robdd),
        stats: ApplyStats::default(),
    };
    let root = ctx.rec(f.root(), g.root())?;
    let stats = ctx.stats;
    Ok((ctx.out.finish(root), stats))
}

/// Functional equivalence, decided by isomorphism of the canonical forms.
pub fn equivalent(f: &Diagram, g: &Diagram) -> Result<bool> {
    if f.num_vars() != g.num_vars() {
        return Err(BddError::VarCountMismatch(f.num_vars(), g.num_vars()));
    }
    Ok(reduce_robdd(f).isomorphic(&reduce_robdd(g)))
}
