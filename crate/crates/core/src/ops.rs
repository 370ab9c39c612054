//! Classical ROBDD operations: reduction, cofactors, negation and
//! construction from cube lists.

use crate::apply::{apply, BoolOp};
use crate::builder::{Builder, ReduceMode};
use crate::diagram::Diagram;
use crate::error::{BddError, Result};
use crate::node::{Level, NodeId};

/// Canonical ROBDD of any ordered diagram, by bottom-up hash-consing with
/// both reduction rules.
pub fn reduce_robdd(d: &Diagram) -> Diagram {
    rebuild(d, ReduceMode::Robdd)
}

pub(crate) fn rebuild(d: &Diagram, mode: ReduceMode) -> Diagram {
    let mut out = Builder::new(d.num_vars(), mode);
    let mut memo = vec![None; d.count_nodes()];
    let root = rebuild_rec(d, d.root(), &mut out, &mut memo);
    out.finish(root)
}

fn rebuild_rec(d: &Diagram, id: NodeId, out: &mut Builder, memo: &mut [Option<NodeId>]) -> NodeId {
    let Some(s) = id.slot() else { return id };
    if let Some(r) = memo[s] {
        return r;
    }
    let n = d.node(id);
    let lo = rebuild_rec(d, n.lo, out, memo);
    let hi = rebuild_rec(d, n.hi, out, memo);
    let r = out
        .mk_node(n.index, lo, hi)
        .expect("children of an ordered diagram stay below their parent");
    memo[s] = Some(r);
    r
}

/// Cofactor `f|x_var = value`, reduced.
pub fn restrict(d: &Diagram, var: Level, value: bool) -> Result<Diagram> {
    if var >= d.num_vars() {
        return Err(BddError::VarOutOfRange {
            index: var,
            num_vars: d.num_vars(),
        });
    }
    let mut out = Builder::new(d.num_vars(), ReduceMode::Robdd);
    let mut memo = vec![None; d.count_nodes()];
    let root = restrict_rec(d, d.root(), var, value, &mut out, &mut memo)?;
    Ok(out.finish(root))
}

fn restrict_rec(
    d: &Diagram,
    id: NodeId,
    var: Level,
    value: bool,
    out: &mut Builder,
    memo: &mut [Option<NodeId>],
) -> Result<NodeId> {
    let Some(s) = id.slot() else { return Ok(id) };
    if let Some(r) = memo[s] {
        return Ok(r);
    }
    let n = d.node(id);
    let r = if n.index == var {
        restrict_rec(d, n.child(value), var, value, out, memo)?
    } else {
        let lo = restrict_rec(d, n.lo, var, value, out, memo)?;
        let hi = restrict_rec(d, n.hi, var, value, out, memo)?;
        out.mk_node(n.index, lo, hi)?
    };
    memo[s] = Some(r);
    Ok(r)
}

/// Complement by swapping the terminals on a structural copy.
pub fn negate(d: &Diagram) -> Diagram {
    let swap = |id: NodeId| match id.terminal_value() {
        Some(v) => NodeId::terminal(!v),
        None => id,
    };
    let nodes: Vec<_> = d
        .nodes()
        .iter()
        .map(|n| crate::node::Node::new(n.index, swap(n.lo), swap(n.hi)))
        .collect();
    Diagram::compact(d.num_vars(), &nodes, swap(d.root()))
}

/// A product term over `n` inputs: `Some(b)` fixes the literal, `None` is a
/// don't-care position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cube(Vec<Option<bool>>);

impl Cube {
    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '-' => Ok(None),
                other => Err(BddError::Cube {
                    cube: text.to_string(),
                    reason: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Cube)
    }

    pub fn literals(&self) -> &[Option<bool>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matches(&self, assignment: &[bool]) -> bool {
        self.0
            .iter()
            .zip(assignment)
            .all(|(lit, &x)| lit.is_none_or(|v| v == x))
    }

    /// ROBDD of the product term.
    pub fn to_diagram(&self) -> Diagram {
        let n = self.0.len() as u32;
        let mut b = Builder::new(n, ReduceMode::Robdd);
        let mut cur = NodeId::TERM1;
        for (level, lit) in self.0.iter().enumerate().rev() {
            if let Some(v) = lit {
                let (lo, hi) = if *v {
                    (NodeId::TERM0, cur)
                } else {
                    (cur, NodeId::TERM0)
                };
                cur = b.mk_node(level as Level, lo, hi).expect("chain is ordered");
            }
        }
        b.finish(cur)
    }
}

impl std::fmt::Display for Cube {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for lit in &self.0 {
            let c = match lit {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// How don't-care points of an incompletely specified function are fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DcPolicy {
    /// Don't-cares evaluate to 0: the function is the ON-set.
    #[default]
    Zero,
    /// Don't-cares evaluate to 1: the function is ON-set ∪ DC-set.
    One,
}

/// ROBDD of the disjunction of `cubes` over `n` variables.
pub fn or_of_cubes(n: u32, cubes: &[Cube]) -> Result<Diagram> {
    for c in cubes {
        if c.len() != n as usize {
            return Err(BddError::Cube {
                cube: c.to_string(),
                reason: format!("expected {n} literals, found {}", c.len()),
            });
        }
    }
    let mut layer: Vec<Diagram> = cubes.iter().map(Cube::to_diagram).collect();
    if layer.is_empty() {
        return Ok(Diagram::constant(n, false));
    }
    // Balanced pairwise disjunction keeps intermediate diagrams small.
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(apply(BoolOp::OR, &a, &b)?),
                None => next.push(a),
            }
        }
        layer = next;
    }
    Ok(layer.pop().unwrap())
}

/// ROBDD of the function given by ON-set and DC-set cubes (strings over
/// `{0,1,-}` of length `n`), with don't-cares fixed by `policy`.
pub fn from_cubes<S: AsRef<str>>(
    n: u32,
    onset: &[S],
    dcset: &[S],
    policy: DcPolicy,
) -> Result<Diagram> {
    let parse = |list: &[S]| -> Result<Vec<Cube>> {
        list.iter().map(|s| Cube::parse(s.as_ref())).collect()
    };
    let mut cubes = parse(onset)?;
    if policy == DcPolicy::One {
        cubes.extend(parse(dcset)?);
    } else {
        // still validated so that malformed input is reported either way
        parse(dcset)?;
    }
    or_of_cubes(n, &cubes)
}
