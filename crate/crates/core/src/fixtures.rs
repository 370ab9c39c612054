//! Small hand-built diagrams used throughout the tests and docs.

use crate::diagram::Diagram;
use crate::node::{Node, NodeId};

const T0: NodeId = NodeId::TERM0;
const T1: NodeId = NodeId::TERM1;

fn id(slot: usize) -> NodeId {
    NodeId::from_slot(slot)
}

fn letter_id(letter: char, letters: &str) -> NodeId {
    let slot = letters
        .find(letter)
        .unwrap_or_else(|| panic!("no node named {letter}"));
    id(slot)
}

/// Five-variable ROBDD with nodes `a..f`:
///
/// ```text
/// a = [0, b, c]   b = [1, d, e]   c = [1, 0, f]
/// d = [2, e, 1]   e = [3, 0, f]   f = [4, 1, 0]
/// ```
pub fn small_robdd() -> Diagram {
    let (a, b, c, d, e, f) = (id(0), id(1), id(2), id(3), id(4), id(5));
    let _ = a;
    Diagram::from_parts(
        5,
        vec![
            Node::new(0, b, c),
            Node::new(1, d, e),
            Node::new(1, T0, f),
            Node::new(2, e, T1),
            Node::new(3, T0, f),
            Node::new(4, T1, T0),
        ],
        id(0),
    )
    .expect("small_robdd fixture is well formed")
}

pub fn small_robdd_id(letter: char) -> NodeId {
    letter_id(letter, "abcdef")
}

/// Five-variable diagram with nodes `a..h` used for edge recovery:
///
/// ```text
/// a = [0, b, h]   b = [1, c, f]   c = [2, 1, d]   d = [3, 1, e]
/// e = [4, 1, 0]   f = [2, d, g]   g = [3, 1, 0]   h = [1, f, g]
/// ```
pub fn edge_sample() -> Diagram {
    let (b, c, d, e, f, g, h) = (id(1), id(2), id(3), id(4), id(5), id(6), id(7));
    Diagram::from_parts(
        5,
        vec![
            Node::new(0, b, h),
            Node::new(1, c, f),
            Node::new(2, T1, d),
            Node::new(3, T1, e),
            Node::new(4, T1, T0),
            Node::new(2, d, g),
            Node::new(3, T1, T0),
            Node::new(1, f, g),
        ],
        id(0),
    )
    .expect("edge_sample fixture is well formed")
}

pub fn edge_sample_id(letter: char) -> NodeId {
    letter_id(letter, "abcdefgh")
}

/// Index-resilient but not quasi-reduced diagram on which chain removal
/// alone creates mergeable nodes (`a` and `b` end up identical):
///
/// ```text
/// root = [0, a, b]   a = [1, r, x]   b = [1, y, x]
/// r = [2, y, y]      x = [2, y, 1]   y = [3, 0, 1]
/// ```
pub fn merge_after_chains() -> Diagram {
    let (a, b, r, x, y) = (id(1), id(2), id(3), id(4), id(5));
    Diagram::from_parts(
        4,
        vec![
            Node::new(0, a, b),
            Node::new(1, r, x),
            Node::new(1, y, x),
            Node::new(2, y, y),
            Node::new(2, y, T1),
            Node::new(3, T0, T1),
        ],
        id(0),
    )
    .expect("merge_after_chains fixture is well formed")
}

/// ROBDD of the parity (XOR) of `n` variables: two nodes per level except
/// the root.
pub fn parity(n: u32) -> Diagram {
    assert!(n > 0);
    // Slot layout: level l has even node at 2l-1 and odd node at 2l, the
    // root is slot 0 (level 0 behaves as "even").
    let mut nodes = Vec::new();
    let slot_of = |level: u32, odd: bool| -> NodeId {
        if level == 0 {
            id(0)
        } else {
            id((2 * level - 1 + odd as u32) as usize)
        }
    };
    for level in 0..n {
        let parities: &[bool] = if level == 0 { &[false] } else { &[false, true] };
        for &odd in parities {
            let (lo, hi) = if level + 1 == n {
                (NodeId::terminal(odd), NodeId::terminal(!odd))
            } else {
                (slot_of(level + 1, odd), slot_of(level + 1, !odd))
            };
            nodes.push(Node::new(level, lo, hi));
        }
    }
    Diagram::from_parts(n, nodes, id(0)).expect("parity fixture is well formed")
}

/// Truth table of parity on `n` variables.
pub fn parity_table(n: u32) -> Vec<bool> {
    (0..1usize << n).map(|k| k.count_ones() % 2 == 1).collect()
}
