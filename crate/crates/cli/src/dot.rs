//! Graphviz export.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use kirchhoff_core::{CircuitSolution, Quantity, WeightedMultiGraph};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Quoted DOT id; `s` must already be escaped.
fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

fn quote(s: &str) -> String {
    quoted(&escape(s))
}

fn show(q: &Quantity) -> String {
    q.ratio_string().unwrap_or_else(|| format!("{}", q.value))
}

/// Undirected DOT text. Edge labels carry the cost; with a solution they also
/// carry the current, nodes show their potential, and the edges listed in
/// `zero_edges` are dashed.
pub fn export_dot(
    g: &WeightedMultiGraph,
    annotations: Option<(&CircuitSolution, &BTreeSet<usize>)>,
) -> String {
    let mut out = String::from("graph G {\n");
    for (i, node) in g.nodes().iter().enumerate() {
        let mut attrs = Vec::new();
        let potential = annotations.and_then(|(s, _)| s.potential(node.as_str()));
        if let Some(p) = potential {
            attrs.push(format!("label={}", quoted(&format!("{}\\nV={}", escape(node.as_str()), show(p)))));
        }
        if i == g.start() || i == g.terminal() {
            attrs.push("shape=doublecircle".to_string());
        }
        let _ = if attrs.is_empty() {
            writeln!(out, "  {};", quote(node.as_str()))
        } else {
            writeln!(out, "  {} [{}];", quote(node.as_str()), attrs.join(", "))
        };
    }
    for e in g.edges() {
        let mut label = format!("{}", e.cost);
        let mut style = "";
        if let Some((solution, zero)) = annotations {
            let _ = write!(label, "\\nI={}", show(solution.current(e.id)));
            if zero.contains(&e.id) {
                style = ", style=dashed";
            }
        }
        let _ = writeln!(
            out,
            "  {} -- {} [label={}{style}];",
            quote(g.name(e.u).as_str()),
            quote(g.name(e.v).as_str()),
            quoted(&label)
        );
    }
    out.push_str("}\n");
    out
}
