//! Graphviz export. 0-edges are dashed, 1-edges solid.

use std::fmt::Write;

use crate::diagram::Diagram;
use crate::node::NodeId;

pub fn export_dot(d: &Diagram) -> String {
    export_dot_named(d, |level| format!("x{level}"))
}

/// DOT text with node labels produced by `var_name`.
pub fn export_dot_named(d: &Diagram, var_name: impl Fn(u32) -> String) -> String {
    let mut out = String::new();
    let name = |id: NodeId| match id.terminal_value() {
        Some(v) => format!("t{}", v as u8),
        None => format!("n{}", id.raw()),
    };
    writeln!(out, "digraph obdd {{").unwrap();
    writeln!(out, "  ordering=out;").unwrap();
    let mut terminals = [false; 2];
    let mut mark = |id: NodeId| {
        if let Some(v) = id.terminal_value() {
            terminals[v as usize] = true;
        }
    };
    mark(d.root());
    for (_, n) in d.iter() {
        mark(n.lo);
        mark(n.hi);
    }
    for (v, used) in terminals.iter().enumerate() {
        if *used {
            writeln!(out, "  t{v} [shape=box, label=\"{v}\"];").unwrap();
        }
    }
    // group nodes of a level on one rank
    for (level, _) in d
        .level_profile()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
    {
        let members: Vec<String> = d
            .iter()
            .filter(|(_, n)| n.index as usize == level)
            .map(|(id, _)| name(id))
            .collect();
        writeln!(out, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
    }
    for (id, n) in d.iter() {
        writeln!(
            out,
            "  {} [shape=circle, label=\"{}\"];",
            name(id),
            var_name(n.index)
        )
        .unwrap();
        writeln!(out, "  {} -> {} [style=dashed];", name(id), name(n.lo)).unwrap();
        writeln!(out, "  {} -> {} [style=solid];", name(id), name(n.hi)).unwrap();
    }
    writeln!(out, "  root [shape=none, label=\"\"];").unwrap();
    writeln!(out, "  root -> {};", name(d.root())).unwrap();
    writeln!(out, "}}").unwrap();
    out
}
