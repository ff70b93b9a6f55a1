//! Seedable random graphs for property tests and benchmarks.

use rand::Rng;

use crate::graph::{NodeId, WeightedMultiGraph};

/// Shape of a random connected graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomGraphSpec {
    /// Nodes in the connected core (at least 2).
    pub core_nodes: usize,
    /// Edges added on top of the core's random spanning tree.
    pub extra_edges: usize,
    /// Nodes hung off the core as trees; their edges can carry no current.
    pub dead_end_nodes: usize,
    /// Integer costs are drawn uniformly from `1..=max_cost`.
    pub max_cost: u32,
}

#[derive(Debug, Clone)]
pub struct RandomGraph {
    pub graph: WeightedMultiGraph,
    /// Ids of the edges inside hanging dead-end trees.
    pub dead_end_edges: Vec<usize>,
}

fn name(i: usize) -> NodeId {
    NodeId::new(format!("n{i:04}")).expect("generated names are valid")
}

/// Random spanning tree plus `extra_edges` random (possibly parallel) edges
/// over the core, then `dead_end_nodes` nodes attached tree-wise. Start is
/// `n0000`; the terminal is a random other core node.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, spec: &RandomGraphSpec) -> RandomGraph {
    let core = spec.core_nodes.max(2);
    let max_cost = spec.max_cost.max(1);
    let cost = |rng: &mut R| f64::from(rng.random_range(1..=max_cost));
    let mut edges = Vec::new();
    for i in 1..core {
        let j = rng.random_range(0..i);
        edges.push((name(i), name(j), cost(rng)));
    }
    for _ in 0..spec.extra_edges {
        let a = rng.random_range(0..core);
        let mut b = rng.random_range(0..core - 1);
        if b >= a {
            b += 1;
        }
        edges.push((name(a), name(b), cost(rng)));
    }
    let mut dead_end_edges = Vec::new();
    for k in 0..spec.dead_end_nodes {
        let node = core + k;
        // each new node touches exactly one earlier node, so every hanging
        // tree meets the core through a single vertex
        let parent = rng.random_range(0..node);
        dead_end_edges.push(edges.len());
        edges.push((name(node), name(parent), cost(rng)));
    }
    let terminal = name(rng.random_range(1..core));
    let nodes: Vec<NodeId> = (0..core + spec.dead_end_nodes).map(name).collect();
    let graph = WeightedMultiGraph::from_parts_unchecked(nodes, edges, &name(0), &terminal);
    RandomGraph { graph, dead_end_edges }
}
