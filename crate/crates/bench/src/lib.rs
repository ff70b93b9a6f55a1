//! Graph families used by the benchmarks.

use kirchhoff_core::generate::{random_graph, RandomGraphSpec};
use kirchhoff_core::{GraphBuilder, WeightedMultiGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `rows × cols` grid with unit costs, start and terminal at opposite corners.
/// Symmetric grids have many equipotential rungs.
pub fn grid(rows: usize, cols: usize) -> WeightedMultiGraph {
    let name = |r: usize, c: usize| format!("g{r:03}_{c:03}");
    let mut b = GraphBuilder::new();
    for r in 0..rows {
        for c in 0..cols {
            if r + 1 < rows {
                b = b.edge(&name(r, c), &name(r + 1, c), 1.0).unwrap();
            }
            if c + 1 < cols {
                b = b.edge(&name(r, c), &name(r, c + 1), 1.0).unwrap();
            }
        }
    }
    b.start(&name(0, 0))
        .unwrap()
        .terminal(&name(rows - 1, cols - 1))
        .unwrap()
        .build()
        .unwrap()
}

/// Random connected graph with about twice as many edges as nodes, plus a
/// fifth as many dead-end nodes.
pub fn random(nodes: usize, seed: u64) -> WeightedMultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomGraphSpec {
        core_nodes: nodes,
        extra_edges: nodes,
        dead_end_nodes: nodes / 5,
        max_cost: 20,
    };
    random_graph(&mut rng, &spec).graph
}
