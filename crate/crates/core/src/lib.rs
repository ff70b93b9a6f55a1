//! Graph simplification for path-finding by treating a weighted graph as a
//! resistor network.
//!
//! Edge costs become resistances and a voltage is applied between the start
//! and terminal nodes. Edges that end up carrying no current join nodes of
//! equal potential and can be dropped without changing the electrical
//! solution. The voltage itself is chosen from the BFS level structure of the
//! graph ([`geometry`]); the network is solved by nodal analysis in either
//! `f64` or exact rational arithmetic ([`circuit`]).
//!
//! ```
//! use kirchhoff_core::{fixtures, parse_graph, simplify, SimplifyConfig};
//!
//! let g = parse_graph(fixtures::CASE_STUDY).unwrap();
//! let report = simplify(&g, &SimplifyConfig::default().exact()).unwrap();
//! assert_eq!(report.removed_edges.len(), 2);
//! assert_eq!(report.simplified_graph.edge_count(), 7);
//! ```

pub mod circuit;
pub mod fixtures;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod number;
pub mod path;
pub mod simplify;

pub use circuit::{solve_circuit, CircuitError, CircuitSolution};
pub use geometry::{
    estimate_st, estimate_voltage, inter_level_costs, level_unit_graph, nearest_cost_edges,
    potential_columns, segment_lengths, select_vmax, InterLevelCosts, LevelUnitGraph,
    PotentialColumns, VmaxPolicy, VoltageError, VoltageEstimate,
};
pub use graph::{
    compute_levels, parse_graph, validate, GraphBuilder, GraphError, LevelAssignment, LevelError,
    NodeId, ValidationOutcome, Violation, WeightedMultiGraph,
};
pub use number::{NumberMode, Quantity};
pub use path::{compare, count_simple_paths, shortest_path, PathComparison, PathError, PathResult};
pub use simplify::{
    remove_edges, simplify, zero_current_edges, SimplificationReport, SimplifyConfig, SimplifyError,
};
