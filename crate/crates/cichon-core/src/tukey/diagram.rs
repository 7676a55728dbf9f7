//! The ten-node diagram of relational systems and its verified arrow set.
//!
//! Nodes carry the invariant names as metadata; edges are the registered
//! executable morphisms (five primary constructions, their duals, a
//! self-dual shift, and one selector edge with its dual). The transitive
//! closure of these base edges is the diagram's reachability relation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u8);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: NodeId,
    /// Invariant computed by the system, e.g. "cov(N)".
    pub label: &'static str,
    /// The relational system, in (minus, plus, relation) shorthand.
    pub system: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Name of the registered morphism realizing the edge.
    pub morphism: String,
}

pub const NODES: [Node; 10] = [
    Node { id: NodeId(1), label: "cov(N)", system: "(R, N, in)" },
    Node { id: NodeId(2), label: "non(M)", system: "(M, R, not-ni)" },
    Node { id: NodeId(3), label: "cof(M)", system: "(M, M, subset)" },
    Node { id: NodeId(4), label: "cof(N)", system: "(N, N, subset)" },
    Node { id: NodeId(5), label: "b", system: "(w^w, w^w, not-ge*)" },
    Node { id: NodeId(6), label: "d", system: "(w^w, w^w, le*)" },
    Node { id: NodeId(7), label: "add(N)", system: "(N, N, not-supset)" },
    Node { id: NodeId(8), label: "add(M)", system: "(M, M, not-supset)" },
    Node { id: NodeId(9), label: "cov(M)", system: "(R, M, in)" },
    Node { id: NodeId(10), label: "non(N)", system: "(N, R, not-ni)" },
];

/// The base arrows, each naming the morphism that realizes it.
pub fn base_edges() -> Vec<Edge> {
    let named: [(u8, u8, &str); 13] = [
        // Primary constructions.
        (1, 2, "covN_to_nonM"),
        (3, 4, "meager_to_null"),
        (8, 5, "meagernotsup_to_baire"),
        (5, 2, "baire_to_covM"),
        (7, 1, "nullnotsup_selector"),
        // A containment-to-avoidance selector and the self-dual shift.
        (2, 3, "nonM_to_cofM"),
        (5, 6, "dominate_shift"),
        // Duals.
        (9, 10, "dual(covN_to_nonM)"),
        (7, 8, "dual(meager_to_null)"),
        (6, 3, "dual(meagernotsup_to_baire)"),
        (9, 6, "dual(baire_to_covM)"),
        (10, 4, "dual(nullnotsup_selector)"),
        (8, 9, "dual(nonM_to_cofM)"),
    ];
    named
        .iter()
        .map(|&(f, t, m)| Edge {
            from: NodeId(f),
            to: NodeId(t),
            morphism: m.to_string(),
        })
        .collect()
}

/// Transitive closure (paths of length >= 1) over node pairs.
pub fn transitive_closure(edges: &[Edge]) -> BTreeSet<(NodeId, NodeId)> {
    let mut reach: BTreeSet<(NodeId, NodeId)> =
        edges.iter().map(|e| (e.from, e.to)).collect();
    loop {
        let mut grew = false;
        let snapshot: Vec<(NodeId, NodeId)> = reach.iter().copied().collect();
        for &(a, b) in &snapshot {
            for &(c, d) in &snapshot {
                if b == c && reach.insert((a, d)) {
                    grew = true;
                }
            }
        }
        if !grew {
            return reach;
        }
    }
}

/// Deterministic DOT rendering of the base arrows.
pub fn to_dot(edges: &[Edge]) -> String {
    let mut out = String::from("digraph cichon {\n  rankdir=LR;\n");
    for n in NODES {
        out.push_str(&format!(
            "  n{} [label=\"{}\\n{}\"];\n",
            n.id.0, n.label, n.system
        ));
    }
    let mut sorted = edges.to_vec();
    sorted.sort();
    for e in &sorted {
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{}\"];\n",
            e.from.0, e.to.0, e.morphism
        ));
    }
    out.push_str("}\n");
    out
}

/// JSON form of the diagram.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramJson {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub closure: Vec<(u8, u8)>,
}

pub fn diagram_json() -> DiagramJson {
    let edges = base_edges();
    let closure = transitive_closure(&edges)
        .into_iter()
        .map(|(a, b)| (a.0, b.0))
        .collect();
    DiagramJson {
        nodes: NODES.to_vec(),
        edges,
        closure,
    }
}
