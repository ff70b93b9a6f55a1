//! Resistor-network model of a graph.
//!
//! Each edge is a resistor whose resistance is its cost. The start node is
//! held at `v_max`, the terminal at 0, and the potentials of the remaining
//! nodes follow from current conservation at every junction (nodal analysis).
//! Edge currents then come from Ohm's law, and loop-voltage conservation is
//! checked separately over a fundamental cycle basis.
//!
//! Only the connected component containing the start node takes part in the
//! solve. Nodes outside it are reported as floating; their edges carry no
//! current. Valid graphs never have floating nodes, but a simplified graph can.

use std::collections::{BTreeMap, VecDeque};

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedMultiGraph;
use crate::linalg::{gaussian_solve, DenseMatrix, SolveError};
use crate::number::{NumberMode, Quantity, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("terminal is not connected to start")]
    Disconnected,
    #[error("voltage must be a finite positive number, got {0}")]
    InvalidVoltage(f64),
    #[error(transparent)]
    Singular(#[from] SolveError),
    #[error("no current flows from start to terminal")]
    ZeroCurrent,
}

/// KCL equations for the non-fixed nodes, in potential unknowns.
#[derive(Debug, Clone)]
pub struct NodalSystem<T> {
    /// Node index of each unknown, ascending (sorted node order).
    pub unknowns: Vec<usize>,
    /// Unknown position of each node, if it is one.
    pub position: Vec<Option<usize>>,
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
    pub v_max: T,
    pub start: usize,
    pub terminal: usize,
    /// Nodes not connected to the start node.
    pub floating: Vec<usize>,
}

/// Conductance-weighted KCL system: `A[i][i]` sums incident conductances,
/// `A[i][j]` is minus the conductance between `i` and `j`, and `b[i]`
/// collects `conductance · v_max` from edges to the start node.
pub fn build_nodal_system<T: Scalar>(
    g: &WeightedMultiGraph,
    v_max: &T,
) -> Result<NodalSystem<T>, CircuitError> {
    let (start, terminal) = (g.start(), g.terminal());
    let reach = g.hop_distances(start);
    if reach[terminal].is_none() {
        return Err(CircuitError::Disconnected);
    }
    let mut position = vec![None; g.node_count()];
    let mut unknowns = Vec::new();
    let mut floating = Vec::new();
    for (n, r) in reach.iter().enumerate() {
        if r.is_none() {
            floating.push(n);
        } else if n != start && n != terminal {
            position[n] = Some(unknowns.len());
            unknowns.push(n);
        }
    }

    let mut matrix = DenseMatrix::zeros(unknowns.len());
    let mut rhs = vec![T::zero(); unknowns.len()];
    for e in g.edges() {
        if reach[e.u].is_none() {
            continue;
        }
        let conductance = T::one() / T::from_input(e.cost);
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let Some(i) = position[a] else { continue };
            matrix.add_to(i, i, &conductance);
            if let Some(j) = position[b] {
                matrix.add_to(i, j, &-conductance.clone());
            } else if b == start {
                rhs[i] = rhs[i].clone() + conductance.clone() * v_max.clone();
            }
        }
    }
    Ok(NodalSystem {
        unknowns,
        position,
        matrix,
        rhs,
        v_max: v_max.clone(),
        start,
        terminal,
        floating,
    })
}

/// Node potentials indexed by node; `None` for floating nodes.
pub fn solve_potentials<T: Scalar>(sys: NodalSystem<T>) -> Result<Vec<Option<T>>, CircuitError> {
    let n_nodes = sys.position.len();
    let solved = gaussian_solve(sys.matrix, sys.rhs)?;
    let mut potentials: Vec<Option<T>> = vec![None; n_nodes];
    for (node, value) in sys.unknowns.iter().zip(solved) {
        potentials[*node] = Some(value);
    }
    potentials[sys.start] = Some(sys.v_max);
    potentials[sys.terminal] = Some(T::zero());
    Ok(potentials)
}

/// Ohm's law per edge, positive from the smaller endpoint name to the larger.
pub fn edge_currents<T: Scalar>(g: &WeightedMultiGraph, potentials: &[Option<T>]) -> Vec<T> {
    g.edges()
        .iter()
        .map(|e| match (&potentials[e.u], &potentials[e.v]) {
            (Some(pu), Some(pv)) => (pu.clone() - pv.clone()) / T::from_input(e.cost),
            _ => T::zero(),
        })
        .collect()
}

/// Net signed current leaving `node`.
pub fn net_outflow<T: Scalar>(g: &WeightedMultiGraph, currents: &[T], node: usize) -> T {
    g.incident(node).iter().fold(T::zero(), |acc, &pos| {
        let e = &g.edges()[pos];
        if e.u == node {
            acc + currents[pos].clone()
        } else {
            acc - currents[pos].clone()
        }
    })
}

/// Largest current imbalance over the junctions (every node except start and
/// terminal), divided by `total_current` when that is non-zero.
pub fn kcl_residual<T: Scalar>(g: &WeightedMultiGraph, currents: &[T], total_current: &T) -> T {
    let worst = (0..g.node_count())
        .filter(|&n| n != g.start() && n != g.terminal())
        .map(|n| net_outflow(g, currents, n).abs())
        .fold(T::zero(), |m, x| if x > m { x } else { m });
    if total_current.is_zero() {
        worst
    } else {
        worst / total_current.abs()
    }
}

/// One step of a cycle: an edge position and whether it is walked from `u`
/// to `v`.
pub type CycleStep = (usize, bool);

/// BFS spanning tree of the start node's component: parent edge of each node.
fn spanning_tree(g: &WeightedMultiGraph) -> Vec<Option<Option<usize>>> {
    // None = not in tree; Some(None) = root; Some(Some(pos)) = parent edge.
    let mut parent: Vec<Option<Option<usize>>> = vec![None; g.node_count()];
    parent[g.start()] = Some(None);
    let mut queue = VecDeque::from([g.start()]);
    while let Some(n) = queue.pop_front() {
        for &pos in g.incident(n) {
            let m = g.edges()[pos].other(n);
            if parent[m].is_none() {
                parent[m] = Some(Some(pos));
                queue.push_back(m);
            }
        }
    }
    parent
}

fn path_to_root(g: &WeightedMultiGraph, parent: &[Option<Option<usize>>], mut n: usize) -> Vec<(usize, usize)> {
    // (node, edge to its parent)
    let mut path = Vec::new();
    while let Some(Some(pos)) = parent[n] {
        path.push((n, pos));
        n = g.edges()[pos].other(n);
    }
    path
}

/// Walk from `from` to `to` along the tree.
fn tree_walk(g: &WeightedMultiGraph, parent: &[Option<Option<usize>>], from: usize, to: usize) -> Vec<CycleStep> {
    let up_from = path_to_root(g, parent, from);
    let up_to = path_to_root(g, parent, to);
    // strip the common suffix (shared ancestry above the meeting point)
    let mut common = 0;
    while common < up_from.len()
        && common < up_to.len()
        && up_from[up_from.len() - 1 - common].1 == up_to[up_to.len() - 1 - common].1
    {
        common += 1;
    }
    let mut steps: Vec<CycleStep> = up_from[..up_from.len() - common]
        .iter()
        .map(|&(node, pos)| (pos, g.edges()[pos].u == node))
        .collect();
    steps.extend(
        up_to[..up_to.len() - common]
            .iter()
            .rev()
            .map(|&(node, pos)| (pos, g.edges()[pos].v == node)),
    );
    steps
}

/// Fundamental cycles of the start node's component with respect to a BFS
/// spanning tree: one per non-tree edge, walked along that edge from `u` to
/// `v` and back to `u` through the tree.
pub fn fundamental_cycles(g: &WeightedMultiGraph) -> Vec<Vec<CycleStep>> {
    let parent = spanning_tree(g);
    let tree_edges: Vec<bool> = {
        let mut t = vec![false; g.edge_count()];
        for p in parent.iter().flatten().flatten() {
            t[*p] = true;
        }
        t
    };
    g.edges()
        .iter()
        .enumerate()
        .filter(|(pos, e)| !tree_edges[*pos] && parent[e.u].is_some())
        .map(|(pos, e)| {
            let mut cycle = vec![(pos, true)];
            cycle.extend(tree_walk(g, &parent, e.v, e.u));
            cycle
        })
        .collect()
}

fn voltage_drop<T: Scalar>(g: &WeightedMultiGraph, currents: &[T], steps: &[CycleStep]) -> T {
    steps.iter().fold(T::zero(), |acc, &(pos, forward)| {
        let drop = currents[pos].clone() * T::from_input(g.edges()[pos].cost);
        if forward {
            acc + drop
        } else {
            acc - drop
        }
    })
}

/// Largest loop-voltage imbalance, divided by `v_max`.
///
/// Checks every fundamental cycle (sum of `current · cost` must vanish) and
/// the source loop (drops along the tree path from start to terminal must
/// add up to `v_max`).
pub fn kvl_residual<T: Scalar>(g: &WeightedMultiGraph, currents: &[T], v_max: &T) -> T {
    let mut worst = fundamental_cycles(g)
        .iter()
        .map(|c| voltage_drop(g, currents, c).abs())
        .fold(T::zero(), |m, x| if x > m { x } else { m });
    let parent = spanning_tree(g);
    if parent[g.terminal()].is_some() {
        let source_path = tree_walk(g, &parent, g.start(), g.terminal());
        let gap = (voltage_drop(g, currents, &source_path) - v_max.clone()).abs();
        if gap > worst {
            worst = gap;
        }
    }
    worst / v_max.clone()
}

/// Total current leaving the start node.
pub fn total_current<T: Scalar>(g: &WeightedMultiGraph, currents: &[T]) -> T {
    net_outflow(g, currents, g.start())
}

pub fn effective_resistance<T: Scalar>(v_max: &T, total_current: &T) -> Result<T, CircuitError> {
    if total_current.is_zero() {
        return Err(CircuitError::ZeroCurrent);
    }
    Ok(v_max.clone() / total_current.clone())
}

/// A solved circuit. Currents are indexed by edge id.
#[derive(Debug, Clone, Serialize)]
pub struct CircuitSolution {
    pub number_mode: NumberMode,
    pub v_max: Quantity,
    pub potentials: BTreeMap<String, Quantity>,
    pub currents: Vec<Quantity>,
    pub floating_nodes: Vec<String>,
    pub total_current: Quantity,
    /// Current entering the terminal.
    pub terminal_current: Quantity,
    pub effective_resistance: Quantity,
    pub kcl_residual: Quantity,
    pub kvl_residual: Quantity,
}

impl CircuitSolution {
    pub fn potential(&self, node: &str) -> Option<&Quantity> {
        self.potentials.get(node)
    }

    pub fn current(&self, edge_id: usize) -> &Quantity {
        &self.currents[edge_id]
    }

    pub fn max_abs_current(&self) -> f64 {
        self.currents.iter().map(|c| c.value.abs()).fold(0.0, f64::max)
    }
}

/// Every per-node and per-edge quantity of a solve, in one number type.
#[derive(Debug, Clone)]
pub struct RawSolution<T> {
    pub potentials: Vec<Option<T>>,
    pub currents: Vec<T>,
    pub total_current: T,
    pub terminal_current: T,
    pub effective_resistance: T,
    pub kcl_residual: T,
    pub kvl_residual: T,
}

pub fn solve_raw<T: Scalar>(g: &WeightedMultiGraph, v_max: &T) -> Result<RawSolution<T>, CircuitError> {
    let potentials = solve_potentials(build_nodal_system(g, v_max)?)?;
    let currents = edge_currents(g, &potentials);
    let total = total_current(g, &currents);
    let terminal_current = -net_outflow(g, &currents, g.terminal());
    let effective_resistance = effective_resistance(v_max, &total)?;
    let kcl_residual = kcl_residual(g, &currents, &total);
    let kvl_residual = kvl_residual(g, &currents, v_max);
    Ok(RawSolution {
        potentials,
        currents,
        total_current: total,
        terminal_current,
        effective_resistance,
        kcl_residual,
        kvl_residual,
    })
}

fn package<T: Scalar>(g: &WeightedMultiGraph, v_max: &T, raw: RawSolution<T>) -> CircuitSolution {
    let mut potentials = BTreeMap::new();
    let mut floating_nodes = Vec::new();
    for (name, p) in g.nodes().iter().zip(&raw.potentials) {
        match p {
            Some(v) => {
                potentials.insert(name.to_string(), v.to_quantity());
            }
            None => floating_nodes.push(name.to_string()),
        }
    }
    CircuitSolution {
        number_mode: T::MODE,
        v_max: v_max.to_quantity(),
        potentials,
        currents: raw.currents.iter().map(Scalar::to_quantity).collect(),
        floating_nodes,
        total_current: raw.total_current.to_quantity(),
        terminal_current: raw.terminal_current.to_quantity(),
        effective_resistance: raw.effective_resistance.to_quantity(),
        kcl_residual: raw.kcl_residual.to_quantity(),
        kvl_residual: raw.kvl_residual.to_quantity(),
    }
}

/// Drives the graph with `v_max` between start and terminal and solves it in
/// the requested number mode.
pub fn solve_circuit(
    g: &WeightedMultiGraph,
    v_max: f64,
    mode: NumberMode,
) -> Result<CircuitSolution, CircuitError> {
    if !(v_max > 0.0 && v_max.is_finite()) {
        return Err(CircuitError::InvalidVoltage(v_max));
    }
    match mode {
        NumberMode::Float64 => {
            let raw = solve_raw::<f64>(g, &v_max)?;
            Ok(package(g, &v_max, raw))
        }
        NumberMode::ExactRational => {
            let v = BigRational::from_input(v_max);
            let raw = solve_raw::<BigRational>(g, &v)?;
            Ok(package(g, &v, raw))
        }
    }
}
