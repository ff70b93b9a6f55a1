//! Two-phase simplification: estimate a driving voltage from the level
//! structure, solve the circuit, and drop every edge that carries no current.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{solve_circuit, CircuitError, CircuitSolution};
use crate::geometry::{
    estimate_voltage, inter_level_costs, nearest_cost_edges, InterLevelCosts, NearestEdge,
    VmaxPolicy, VoltageError, VoltageEstimate,
};
use crate::graph::{compute_levels, validate, LevelError, Violation, WeightedMultiGraph};
use crate::number::{NumberMode, Quantity};
use crate::path::{compare, PathComparison};

pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplifyError {
    #[error("invalid graph: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidGraph(Vec<Violation>),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Voltage(#[from] VoltageError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("zero tolerance {0} must lie in [0, 1)")]
    InvalidTolerance(f64),
    #[error("edge id {0} does not exist")]
    UnknownEdgeId(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifyConfig {
    pub vmax_policy: VmaxPolicy,
    pub number_mode: NumberMode,
    /// Relative to the largest edge current. Unused in exact mode.
    pub zero_tolerance: f64,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        Self {
            vmax_policy: VmaxPolicy::HalfSt,
            number_mode: NumberMode::Float64,
            zero_tolerance: DEFAULT_ZERO_TOLERANCE,
        }
    }
}

impl SimplifyConfig {
    pub fn exact(mut self) -> Self {
        self.number_mode = NumberMode::ExactRational;
        self
    }

    pub fn with_policy(mut self, policy: VmaxPolicy) -> Self {
        self.vmax_policy = policy;
        self
    }

    pub fn check(&self) -> Result<(), SimplifyError> {
        if (0.0..1.0).contains(&self.zero_tolerance) {
            Ok(())
        } else {
            Err(SimplifyError::InvalidTolerance(self.zero_tolerance))
        }
    }
}

/// Edge ids whose current is zero: exactly zero in exact mode, otherwise at
/// most `zero_tolerance` times the largest edge current.
pub fn zero_current_edges(solution: &CircuitSolution, cfg: &SimplifyConfig) -> BTreeSet<usize> {
    let threshold = match solution.number_mode {
        NumberMode::ExactRational => None,
        NumberMode::Float64 => Some(cfg.zero_tolerance * solution.max_abs_current()),
    };
    solution
        .currents
        .iter()
        .enumerate()
        .filter(|(_, c)| match (threshold, &c.exact) {
            (_, Some(_)) | (None, _) => c.is_zero(),
            (Some(t), None) => c.value.abs() <= t,
        })
        .map(|(id, _)| id)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRemoval {
    pub graph: WeightedMultiGraph,
    /// New id of each original edge, `None` when removed.
    pub id_map: Vec<Option<usize>>,
}

/// Drops the given edges, keeping every node. Surviving edges are renumbered
/// densely in their original order.
pub fn remove_edges(g: &WeightedMultiGraph, ids: &BTreeSet<usize>) -> Result<EdgeRemoval, SimplifyError> {
    if let Some(&bad) = ids.iter().find(|&&id| id >= g.edge_count()) {
        return Err(SimplifyError::UnknownEdgeId(bad));
    }
    let mut id_map = Vec::with_capacity(g.edge_count());
    let mut next = 0;
    for e in g.edges() {
        if ids.contains(&e.id) {
            id_map.push(None);
        } else {
            id_map.push(Some(next));
            next += 1;
        }
    }
    let graph = g.with_edges(g.edges().iter().filter(|e| !ids.contains(&e.id)).copied());
    Ok(EdgeRemoval { graph, id_map })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
}

impl From<&WeightedMultiGraph> for GraphSummary {
    fn from(g: &WeightedMultiGraph) -> Self {
        Self { nodes: g.node_count(), edges: g.edge_count() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovedEdge {
    pub id: usize,
    pub u: String,
    pub v: String,
    pub cost: f64,
    pub current: Quantity,
}

/// Result of solving the simplified graph again.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolveCheck {
    pub effective_resistance: Quantity,
    /// Largest potential difference over nodes solved in both graphs,
    /// relative to `v_max` (0 when exact values agree).
    pub max_potential_shift: f64,
    /// Exact mode only: all shared potentials and the effective resistance
    /// agree as rationals.
    pub exact_match: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplificationReport {
    pub config: SimplifyConfig,
    pub original: GraphSummary,
    pub levels: BTreeMap<String, usize>,
    pub inter_level_costs: InterLevelCosts,
    pub voltage: VoltageEstimate,
    pub nearest_cost_edges: Vec<NearestEdge>,
    pub circuit: CircuitSolution,
    pub removed_edges: Vec<RemovedEdge>,
    pub simplified: GraphSummary,
    pub id_map: Vec<Option<usize>>,
    pub equipotential_pairs: Vec<(String, String)>,
    pub resolve: Option<ResolveCheck>,
    pub path_comparison: Option<PathComparison>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub simplified_graph: WeightedMultiGraph,
}

impl SimplificationReport {
    pub fn removed_ids(&self) -> BTreeSet<usize> {
        self.removed_edges.iter().map(|e| e.id).collect()
    }
}

/// Pairs of adjacent nodes whose potentials agree (exactly, or within
/// `tolerance · v_max`).
pub fn equipotential_pairs(
    g: &WeightedMultiGraph,
    solution: &CircuitSolution,
    tolerance: f64,
) -> Vec<(String, String)> {
    let mut pairs = BTreeSet::new();
    for e in g.edges() {
        let (a, b) = (g.name(e.u).as_str(), g.name(e.v).as_str());
        let (Some(pa), Some(pb)) = (solution.potential(a), solution.potential(b)) else {
            continue;
        };
        let equal = match (&pa.exact, &pb.exact) {
            (Some(x), Some(y)) => x == y,
            _ => (pa.value - pb.value).abs() <= tolerance * solution.v_max.value,
        };
        if equal {
            pairs.insert((a.to_string(), b.to_string()));
        }
    }
    pairs.into_iter().collect()
}

fn resolve_check(before: &CircuitSolution, after: &CircuitSolution) -> ResolveCheck {
    let mut shift: f64 = 0.0;
    let mut exact_match = true;
    for (node, p) in &after.potentials {
        if let Some(q) = before.potentials.get(node) {
            shift = shift.max((p.value - q.value).abs() / before.v_max.value);
            exact_match &= p.exact == q.exact;
        }
    }
    exact_match &= after.effective_resistance.exact == before.effective_resistance.exact;
    ResolveCheck {
        effective_resistance: after.effective_resistance.clone(),
        max_potential_shift: shift,
        exact_match: before.effective_resistance.exact.as_ref().map(|_| exact_match),
    }
}

/// Runs the full pipeline: levels, inter-level costs, ST bound, voltage
/// choice, circuit solve, zero-current detection, single-pass removal, a
/// diagnostic re-solve of the result, and a shortest-path comparison.
pub fn simplify(g: &WeightedMultiGraph, cfg: &SimplifyConfig) -> Result<SimplificationReport, SimplifyError> {
    cfg.check()?;
    let outcome = validate(g);
    if !outcome.is_valid() {
        return Err(SimplifyError::InvalidGraph(outcome.violations));
    }
    let lv = compute_levels(g)?;
    let costs = inter_level_costs(g, &lv);
    let voltage = estimate_voltage(&costs, cfg.vmax_policy)?;
    let nearest = nearest_cost_edges(g, &lv, &voltage.segments);
    let circuit = solve_circuit(g, voltage.v_max, cfg.number_mode)?;

    let zero = zero_current_edges(&circuit, cfg);
    let removal = remove_edges(g, &zero)?;
    let removed_edges = zero
        .iter()
        .map(|&id| {
            let e = &g.edges()[id];
            RemovedEdge {
                id,
                u: g.name(e.u).to_string(),
                v: g.name(e.v).to_string(),
                cost: e.cost,
                current: circuit.current(id).abs(),
            }
        })
        .collect();

    let mut warnings = Vec::new();
    let simplified = removal.graph;
    let resolve = match solve_circuit(&simplified, voltage.v_max, cfg.number_mode) {
        Ok(after) => Some(resolve_check(&circuit, &after)),
        Err(CircuitError::Disconnected) => {
            warnings.push("simplified graph disconnects start from terminal".to_string());
            None
        }
        Err(err) => {
            warnings.push(format!("re-solving the simplified graph failed: {err}"));
            None
        }
    };
    let path_comparison = match compare(g, &simplified) {
        Ok(c) => Some(c),
        Err(err) => {
            warnings.push(format!("path comparison unavailable: {err}"));
            None
        }
    };

    Ok(SimplificationReport {
        config: *cfg,
        original: g.into(),
        levels: lv.by_name(g).into_iter().map(|(n, l)| (n.to_string(), l)).collect(),
        inter_level_costs: costs,
        voltage,
        nearest_cost_edges: nearest,
        equipotential_pairs: equipotential_pairs(g, &circuit, cfg.zero_tolerance),
        circuit,
        removed_edges,
        simplified: (&simplified).into(),
        id_map: removal.id_map,
        resolve,
        path_comparison,
        warnings,
        simplified_graph: simplified,
    })
}
