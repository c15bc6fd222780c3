//! LP-format export of the K-contingency integer program.
//!
//! Variables `x_<entity>_<t>` in {0,1,2} track each entity's state over
//! the horizon t = 0..=T with T = |E|-1. Binary indicators `f_<entity>`
//! select the K initially failed entities through `x_0 = 2 - 2 f`; the
//! objective minimizes the sum of final-step states. Each operator node
//! of the IDR forest contributes one auxiliary variable per time step:
//! `z` (min-AND) bounded above by each child, `h` (max-OR) bounded below
//! by each child, and `g` (new-XOR) with N*g bounded by the child sum.
//! Auxiliaries read child values from the previous step, matching the
//! synchronous cascade.
//!
//! Note the engine itself never solves this program: optimality at desk
//! scale comes from the exhaustive solver, and the new-XOR bound here is
//! a relaxation (it admits g = 1 with all inputs full), so the evaluator
//! remains the semantic authority.

use std::fmt::Write as _;

use crate::error::Result;
use crate::idr::IdrExpression;
use crate::network::Network;

/// Emit the model as LP-format text.
pub fn export_ilp(net: &Network, k: usize) -> Result<String> {
    let entities: Vec<String> = net.entities().iter().map(|e| e.to_string()).collect();
    let horizon = net.len().saturating_sub(1);

    let mut out = String::new();
    out.push_str("\\ K-contingency integer program\n");
    let _ = writeln!(out, "\\ entities: {}, horizon T = {}, K = {}", entities.len(), horizon, k);
    out.push_str("\\ x_<entity>_<t>: operational state in {0,1,2}\n");
    out.push_str("\\ f_<entity>: binary initial-failure indicator, x_0 = 2 - 2 f\n");
    out.push_str("\\ z/h/g_<n>_<t>: one auxiliary per operator node per step\n");
    out.push_str("\\   z (min-AND): bounded above by every child at t-1\n");
    out.push_str("\\   h (max-OR):  bounded below by every child at t-1\n");
    out.push_str("\\   g (new-XOR): N g <= sum of children at t-1 (relaxation)\n");
    out.push_str("\\ mono: states never increase between consecutive steps\n");

    out.push_str("Minimize\n obj:");
    for (i, e) in entities.iter().enumerate() {
        let _ = write!(out, "{}x_{}_{}", if i == 0 { " " } else { " + " }, e, horizon);
    }
    out.push('\n');

    out.push_str("Subject To\n");
    // Initial failure encoding: K entities start at 0, the rest at 2.
    for e in &entities {
        let _ = writeln!(out, " init_{e}: x_{e}_0 + 2 f_{e} = 2");
    }
    out.push_str(" card:");
    for (i, e) in entities.iter().enumerate() {
        let _ = write!(out, "{}f_{}", if i == 0 { " " } else { " + " }, e);
    }
    let _ = writeln!(out, " = {k}");

    // Monotone state trajectories.
    for e in &entities {
        for t in 1..=horizon {
            let _ = writeln!(out, " mono_{e}_{t}: x_{e}_{t} - x_{e}_{} <= 0", t - 1);
        }
    }

    // One auxiliary per operator node per step, wired bottom-up: child
    // references read the previous step (clamped to step 1 at the start).
    let mut aux_names: Vec<String> = Vec::new();
    let mut node_counter = 0usize;
    for idr in net.idrs().values() {
        let target = idr.target.to_string();
        let nodes = flatten_nodes(&idr.expr, &mut node_counter);
        for t in 1..=horizon {
            for node in &nodes {
                emit_node_rows(node, t, &mut aux_names, &mut out);
            }
            let root = term_at(&idr.expr, &nodes, t);
            let _ = writeln!(out, " tie_{target}_{t}: x_{target}_{t} - {root} <= 0");
        }
    }

    out.push_str("Bounds\n");
    for e in &entities {
        for t in 0..=horizon {
            let _ = writeln!(out, " 0 <= x_{e}_{t} <= 2");
        }
    }
    for name in &aux_names {
        let _ = writeln!(out, " 0 <= {name} <= 2");
    }
    out.push_str("Binaries\n");
    for e in &entities {
        let _ = writeln!(out, " f_{e}");
    }
    out.push_str("End\n");
    Ok(out)
}

enum NodeKind {
    Min,
    Max,
    Xor,
}

enum ChildRef {
    /// Leaf entity token; reads `x_<token>_<t-1>`.
    Leaf(String),
    /// Operator child by auxiliary name base; reads `<base>_<t-1>`.
    Node(String),
}

struct OpNode {
    base: String,
    kind: NodeKind,
    children: Vec<ChildRef>,
}

/// Flatten operator nodes in post-order with globally unique ids, so each
/// node owns exactly one auxiliary variable per time step.
fn flatten_nodes(expr: &IdrExpression, counter: &mut usize) -> Vec<OpNode> {
    let mut nodes = Vec::new();
    flatten_rec(expr, counter, &mut nodes);
    nodes
}

fn flatten_rec(
    expr: &IdrExpression,
    counter: &mut usize,
    nodes: &mut Vec<OpNode>,
) -> Option<String> {
    let (kind, children) = match expr {
        IdrExpression::Leaf(_) => return None,
        IdrExpression::MinAnd(cs) => (NodeKind::Min, cs),
        IdrExpression::MaxOr(cs) => (NodeKind::Max, cs),
        IdrExpression::NewXor(cs) => (NodeKind::Xor, cs),
    };
    let refs: Vec<ChildRef> = children
        .iter()
        .map(|c| match c {
            IdrExpression::Leaf(e) => ChildRef::Leaf(e.to_string()),
            _ => ChildRef::Node(flatten_rec(c, counter, nodes).expect("operator child")),
        })
        .collect();
    let id = *counter;
    *counter += 1;
    let prefix = match kind {
        NodeKind::Min => 'z',
        NodeKind::Max => 'h',
        NodeKind::Xor => 'g',
    };
    let base = format!("{prefix}{id}");
    nodes.push(OpNode { base: base.clone(), kind, children: refs });
    Some(base)
}

/// The term naming a child's value one step earlier (clamped to step 1,
/// where auxiliaries first exist).
fn child_term(child: &ChildRef, t: usize) -> String {
    match child {
        ChildRef::Leaf(tok) => format!("x_{tok}_{}", t - 1),
        ChildRef::Node(base) => format!("{base}_{}", (t - 1).max(1)),
    }
}

fn emit_node_rows(node: &OpNode, t: usize, aux_names: &mut Vec<String>, out: &mut String) {
    let name = format!("{}_{t}", node.base);
    match node.kind {
        NodeKind::Min => {
            for (ci, c) in node.children.iter().enumerate() {
                let _ = writeln!(out, " zc{}_{t}_{ci}: {name} - {} <= 0", node.base, child_term(c, t));
            }
        }
        NodeKind::Max => {
            for (ci, c) in node.children.iter().enumerate() {
                let _ = writeln!(out, " hc{}_{t}_{ci}: {name} - {} >= 0", node.base, child_term(c, t));
            }
        }
        NodeKind::Xor => {
            let mut row = format!(" gc{}_{t}: {} {name}", node.base, node.children.len());
            for c in &node.children {
                let _ = write!(row, " - {}", child_term(c, t));
            }
            let _ = writeln!(out, "{row} <= 0");
        }
    }
    aux_names.push(name);
}

/// The term naming the expression root at step `t`.
fn term_at(expr: &IdrExpression, nodes: &[OpNode], t: usize) -> String {
    match expr {
        IdrExpression::Leaf(e) => format!("x_{e}_{t}"),
        _ => format!("{}_{t}", nodes.last().expect("root node flattened").base),
    }
}
