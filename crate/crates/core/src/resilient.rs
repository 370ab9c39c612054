//! Operations that tolerate faults while they run: recursive index repair on
//! index-resilient diagrams, an Apply that needs no unique table and
//! survives corrupted memo entries, and the reduction back to index-resilient
//! reduced form.

use std::ops::AddAssign;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::apply::{BoolOp, MemoKind, MemoLookup, MemoTable};
use crate::diagram::{snapshot, Diagram, LevelSource};
use crate::error::{BddError, Result};
use crate::fault::{inject_random_indices, Component, FaultOverlay};
use crate::index_resilient::{ir_reduce_from, is_index_resilient};
use crate::node::{Level, Node, NodeId};
use crate::quasi::{merge_hashed, merge_quadratic_from, pad_chains_from};

/// Result of one top-level index repair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Repair {
    pub level: Level,
    /// Recursive invocations, the top call included; 0 when the index was
    /// not corrupt.
    pub invocations: usize,
}

/// Restores the index of `id` from its children: `n - 1` above two
/// terminals, otherwise `min(child levels) - 1`, repairing corrupted
/// children first. Every repaired index is written back and unflagged.
///
/// Correct only on index-resilient diagrams with intact edges.
pub fn index_reconstruct(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    id: NodeId,
) -> Result<Repair> {
    d.try_node(id)?;
    let mut invocations = 0;
    let level = reconstruct_rec(d, overlay, id, &mut invocations);
    Ok(Repair { level, invocations })
}

fn reconstruct_rec(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    id: NodeId,
    invocations: &mut usize,
) -> Level {
    let n = d.num_vars();
    if id.is_terminal() {
        return n;
    }
    if !overlay.is_corrupt(id, Component::Index) {
        return d.node(id).index;
    }
    *invocations += 1;
    let node = d.node(id);
    let level = if node.lo.is_terminal() && node.hi.is_terminal() {
        n - 1
    } else {
        let lo = reconstruct_rec(d, overlay, node.lo, invocations);
        let hi = reconstruct_rec(d, overlay, node.hi, invocations);
        lo.min(hi) - 1
    };
    d.node_mut(id).index = level;
    overlay.clear(id, Component::Index);
    level
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RepairStats {
    pub index_faults_injected: usize,
    /// Top-level index repairs triggered by reading a flagged index.
    pub repair_calls: usize,
    pub reconstruct_invocations: usize,
    pub max_invocations_per_call: usize,
    pub memo_faults_injected: usize,
    pub memo_recomputations: usize,
}

impl AddAssign for RepairStats {
    fn add_assign(&mut self, o: Self) {
        self.index_faults_injected += o.index_faults_injected;
        self.repair_calls += o.repair_calls;
        self.reconstruct_invocations += o.reconstruct_invocations;
        self.max_invocations_per_call = self
            .max_invocations_per_call
            .max(o.max_invocations_per_call);
        self.memo_faults_injected += o.memo_faults_injected;
        self.memo_recomputations += o.memo_recomputations;
    }
}

/// Level access that repairs a flagged index on first read.
pub struct Guarded<'a> {
    diagram: &'a mut Diagram,
    overlay: &'a mut FaultOverlay,
    pub stats: RepairStats,
}

impl<'a> Guarded<'a> {
    pub fn new(diagram: &'a mut Diagram, overlay: &'a mut FaultOverlay) -> Self {
        Guarded {
            diagram,
            overlay,
            stats: RepairStats::default(),
        }
    }
}

impl LevelSource for Guarded<'_> {
    fn num_vars(&self) -> u32 {
        self.diagram.num_vars()
    }
    fn root(&self) -> NodeId {
        self.diagram.root()
    }
    fn arena_len(&self) -> usize {
        self.diagram.count_nodes()
    }
    fn children(&self, id: NodeId) -> (NodeId, NodeId) {
        let n = self.diagram.node(id);
        (n.lo, n.hi)
    }
    fn level_of(&mut self, id: NodeId) -> Result<Level> {
        if !self.overlay.is_corrupt(id, Component::Index) {
            return Ok(self.diagram.level(id));
        }
        let r = index_reconstruct(self.diagram, self.overlay, id)?;
        self.stats.repair_calls += 1;
        self.stats.reconstruct_invocations += r.invocations;
        self.stats.max_invocations_per_call =
            self.stats.max_invocations_per_call.max(r.invocations);
        Ok(r.level)
    }
}

/// Seeded description of the faults to strike during a resilient run.
#[derive(Clone, Debug)]
pub struct FaultPlan {
    rng: ChaCha8Rng,
    /// Chance that a memo hit finds its entry corrupted.
    pub memo_probability: f64,
    /// Maximum number of memo entries corrupted over the run.
    pub memo_budget: usize,
    /// Index faults injected into each intermediate diagram.
    pub index_faults_per_stage: usize,
}

impl FaultPlan {
    /// A plan that never injects anything.
    pub fn none() -> Self {
        Self::new(0)
    }

    pub fn new(seed: u64) -> Self {
        FaultPlan {
            rng: ChaCha8Rng::seed_from_u64(seed),
            memo_probability: 0.0,
            memo_budget: 0,
            index_faults_per_stage: 0,
        }
    }

    pub fn with_memo_faults(mut self, probability: f64, budget: usize) -> Self {
        self.memo_probability = probability;
        self.memo_budget = budget;
        self
    }

    pub fn with_index_faults(mut self, per_stage: usize) -> Self {
        self.index_faults_per_stage = per_stage;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Corrupts `index_faults_per_stage` random indices of `d`.
    pub fn strike_indices(&mut self, d: &mut Diagram, overlay: &mut FaultOverlay) -> usize {
        if self.index_faults_per_stage == 0 {
            return 0;
        }
        inject_random_indices(d, overlay, self.index_faults_per_stage, &mut self.rng).len()
    }

    fn strike_memo(&mut self) -> bool {
        if self.memo_budget == 0 || self.memo_probability <= 0.0 {
            return false;
        }
        let hit = self.rng.random_bool(self.memo_probability.min(1.0));
        if hit {
            self.memo_budget -= 1;
        }
        hit
    }
}

struct ResilientApply<'a, 'b> {
    op: BoolOp,
    f: Guarded<'a>,
    g: Guarded<'b>,
    memo: MemoTable,
    out: Vec<Node>,
    plan: &'a mut FaultPlan,
    stats: RepairStats,
}

impl ResilientApply<'_, '_> {
    fn rec(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        if let (Some(x), Some(y)) = (a.terminal_value(), b.terminal_value()) {
            return Ok(NodeId::terminal(self.op.eval(x, y)));
        }
        if let MemoLookup::Hit(v) = self.memo.get((a, b)) {
            if self.plan.strike_memo() {
                let scrambled = NodeId::from_raw(v.raw() ^ 1);
                self.memo.corrupt((a, b), scrambled);
                self.stats.memo_faults_injected += 1;
            }
        }
        match self.memo.get((a, b)) {
            MemoLookup::Hit(r) => return Ok(r),
            MemoLookup::Corrupt => self.stats.memo_recomputations += 1,
            MemoLookup::Miss => {}
        }
        let la = self.f.level_of(a)?;
        let lb = self.g.level_of(b)?;
        let top = la.min(lb);
        let (a0, a1) = if la == top {
            self.f.children(a)
        } else {
            (a, a)
        };
        let (b0, b1) = if lb == top {
            self.g.children(b)
        } else {
            (b, b)
        };
        let lo = self.rec(a0, b0)?;
        let hi = self.rec(a1, b1)?;
        self.out.push(Node::new(top, lo, hi));
        let r = NodeId::from_slot(self.out.len() - 1);
        self.memo.insert((a, b), r);
        Ok(r)
    }
}

/// `op(f, g)` computed without a unique table and without the deletion
/// rule: one fresh node per computed operand pair, so the output may hold
/// mergeable and redundant nodes, but every node keeps a child exactly one
/// level below it when `f` and `g` are index-resilient.
///
/// Flagged indices in `f` and `g` are repaired when first read. Memo entries
/// corrupted according to `plan` are detected and recomputed.
pub fn resilient_apply(
    op: BoolOp,
    f: (&mut Diagram, &mut FaultOverlay),
    g: (&mut Diagram, &mut FaultOverlay),
    plan: &mut FaultPlan,
) -> Result<(Diagram, RepairStats)> {
    let n = f.0.num_vars();
    if n != g.0.num_vars() {
        return Err(BddError::VarCountMismatch(n, g.0.num_vars()));
    }
    // A terminal root that fixes the result needs no traversal at all.
    let fixed = match (f.0.root().terminal_value(), g.0.root().terminal_value()) {
        (Some(x), Some(y)) => Some(op.eval(x, y)),
        (Some(x), None) => op.absorbs(x, true),
        (None, Some(y)) => op.absorbs(y, false),
        (None, None) => None,
    };
    if let Some(v) = fixed {
        return Ok((Diagram::constant(n, v), RepairStats::default()));
    }
    let memo = MemoTable::new(MemoKind::Auto, f.0.count_nodes() + 2, g.0.count_nodes() + 2);
    let (fr, gr) = (f.0.root(), g.0.root());
    let mut ctx = ResilientApply {
        op,
        f: Guarded::new(f.0, f.1),
        g: Guarded::new(g.0, g.1),
        memo,
        out: Vec::new(),
        plan,
        stats: RepairStats::default(),
    };
    let root = ctx.rec(fr, gr)?;
    let mut stats = ctx.stats;
    stats += ctx.f.stats;
    stats += ctx.g.stats;
    Ok((Diagram::compact(n, &ctx.out, root), stats))
}

/// How step 2 of the reduction merges nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MergeStrategy {
    /// Pairwise scan without any hash structure.
    #[default]
    Quadratic,
    /// Hash-consing; faster but not fault tolerant.
    Hashed,
}

/// Pads long edges, merges, then removes removable chains, repairing any
/// flagged index on first read. Index faults from `plan` strike the padded
/// and the merged intermediate diagrams.
pub fn reduction_procedure(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    plan: &mut FaultPlan,
) -> Result<(Diagram, RepairStats)> {
    reduction_procedure_with(d, overlay, plan, MergeStrategy::Quadratic)
}

pub fn reduction_procedure_with(
    d: &mut Diagram,
    overlay: &mut FaultOverlay,
    plan: &mut FaultPlan,
    strategy: MergeStrategy,
) -> Result<(Diagram, RepairStats)> {
    let mut stats = RepairStats::default();

    let mut guard = Guarded::new(d, overlay);
    let mut padded = pad_chains_from(&mut guard)?;
    stats += guard.stats;
    log::debug!("padded to {} nodes", padded.count_nodes());

    let mut ov = FaultOverlay::new(&padded);
    stats.index_faults_injected += plan.strike_indices(&mut padded, &mut ov);
    let mut guard = Guarded::new(&mut padded, &mut ov);
    let mut merged = match strategy {
        MergeStrategy::Quadratic => merge_quadratic_from(&mut guard)?,
        MergeStrategy::Hashed => {
            let nodes = snapshot(&mut guard)?;
            let root = guard.root();
            merge_hashed(&Diagram::compact(guard.num_vars(), &nodes, root))
        }
    };
    stats += guard.stats;
    log::debug!("merged to {} nodes", merged.count_nodes());

    let mut ov = FaultOverlay::new(&merged);
    stats.index_faults_injected += plan.strike_indices(&mut merged, &mut ov);
    let mut guard = Guarded::new(&mut merged, &mut ov);
    let out = ir_reduce_from(&mut guard)?;
    stats += guard.stats;
    Ok((out, stats))
}

/// Resilient Apply followed by the reduction procedure, on private copies
/// of the operands. Index faults from `plan` also strike both operands and
/// the raw Apply output, which must therefore be index-resilient.
pub fn resilient_pipeline(
    op: BoolOp,
    f: &Diagram,
    g: &Diagram,
    plan: &mut FaultPlan,
) -> Result<(Diagram, RepairStats)> {
    if plan.index_faults_per_stage > 0 {
        for d in [f, g] {
            if !is_index_resilient(d) {
                return Err(BddError::Contract(
                    "index faults need index-resilient operands".into(),
                ));
            }
        }
    }
    let mut stats = RepairStats::default();
    let (mut f, mut g) = (f.clone(), g.clone());
    let (mut fo, mut go) = (FaultOverlay::new(&f), FaultOverlay::new(&g));
    stats.index_faults_injected += plan.strike_indices(&mut f, &mut fo);
    stats.index_faults_injected += plan.strike_indices(&mut g, &mut go);
    let (mut raw, s) = resilient_apply(op, (&mut f, &mut fo), (&mut g, &mut go), plan)?;
    stats += s;
    let mut ro = FaultOverlay::new(&raw);
    stats.index_faults_injected += plan.strike_indices(&mut raw, &mut ro);
    let (out, s) = reduction_procedure(&mut raw, &mut ro, plan)?;
    stats += s;
    Ok((out, stats))
}
