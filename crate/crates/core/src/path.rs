//! Shortest paths and simple-path counting, used to measure what a
//! simplification does to the path-finding problem.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{NodeId, WeightedMultiGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("no path from `{from}` to `{to}`")]
    NoPath { from: NodeId, to: NodeId },
    #[error("graphs disagree on start/terminal")]
    MismatchedEndpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances from `source` to every node.
pub fn dijkstra(g: &WeightedMultiGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem { dist: 0.0, node: source }]);
    while let Some(HeapItem { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &pos in g.incident(node) {
            let e = &g.edges()[pos];
            let next = e.other(node);
            let nd = d + e.cost;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(HeapItem { dist: nd, node: next });
            }
        }
    }
    dist
}

/// Minimum-cost path from `from` to `to`.
///
/// Among equal-cost paths the lexicographically smallest node sequence wins;
/// between parallel edges the cheaper one, then the lower id. Distances are
/// taken from `to` so the path can be walked greedily from `from`.
pub fn shortest_path(g: &WeightedMultiGraph, from: usize, to: usize) -> Result<PathResult, PathError> {
    let to_target = dijkstra(g, to);
    if !to_target[from].is_finite() {
        return Err(PathError::NoPath { from: g.name(from).clone(), to: g.name(to).clone() });
    }
    let on_shortest = |remaining: f64, step: f64, rest: f64| {
        let slack = 1e-12 * remaining.max(1.0);
        rest < remaining && (step + rest - remaining).abs() <= slack
    };

    let mut nodes = vec![g.name(from).clone()];
    let mut edges = Vec::new();
    let mut cost = 0.0;
    let mut at = from;
    while at != to {
        let mut best: Option<(usize, &crate::graph::Edge)> = None;
        for &pos in g.incident(at) {
            let e = &g.edges()[pos];
            let next = e.other(at);
            if !on_shortest(to_target[at], e.cost, to_target[next]) {
                continue;
            }
            let better = match best {
                None => true,
                Some((b_next, b)) => (g.name(next), e.cost, e.id) < (g.name(b_next), b.cost, b.id),
            };
            if better {
                best = Some((next, e));
            }
        }
        let (next, e) = best.expect("a finite distance always has a tight edge");
        edges.push(e.id);
        cost += e.cost;
        nodes.push(g.name(next).clone());
        at = next;
    }
    Ok(PathResult { nodes, edges, cost })
}

/// Number of simple paths (distinct edge sequences visiting no node twice)
/// from `from` to `to`, stopping at `cap`.
pub fn count_simple_paths(g: &WeightedMultiGraph, from: usize, to: usize, cap: u64) -> u64 {
    fn walk(g: &WeightedMultiGraph, at: usize, to: usize, seen: &mut [bool], count: &mut u64, cap: u64) {
        if *count >= cap {
            return;
        }
        if at == to {
            *count += 1;
            return;
        }
        seen[at] = true;
        for &pos in g.incident(at) {
            let next = g.edges()[pos].other(at);
            if !seen[next] {
                walk(g, next, to, seen, count, cap);
            }
        }
        seen[at] = false;
    }
    let mut count = 0;
    let mut seen = vec![false; g.node_count()];
    walk(g, from, to, &mut seen, &mut count, cap);
    count.min(cap)
}

pub const DEFAULT_PATH_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathComparison {
    pub before: PathResult,
    pub after: PathResult,
    pub cost_preserved: bool,
    pub edges_removed_count: usize,
    pub search_space_reduction: f64,
    pub simple_paths_before: u64,
    pub simple_paths_after: u64,
}

/// Shortest start→terminal paths on both graphs. `cost_preserved` allows a
/// relative difference of 1e-9.
pub fn compare(before: &WeightedMultiGraph, after: &WeightedMultiGraph) -> Result<PathComparison, PathError> {
    if before.name(before.start()) != after.name(after.start())
        || before.name(before.terminal()) != after.name(after.terminal())
    {
        return Err(PathError::MismatchedEndpoints);
    }
    let b = shortest_path(before, before.start(), before.terminal())?;
    let a = shortest_path(after, after.start(), after.terminal())?;
    let cost_preserved = (a.cost - b.cost).abs() <= 1e-9 * b.cost.abs();
    let removed = before.edge_count().saturating_sub(after.edge_count());
    let reduction = if before.edge_count() == 0 {
        0.0
    } else {
        removed as f64 / before.edge_count() as f64
    };
    Ok(PathComparison {
        before: b,
        after: a,
        cost_preserved,
        edges_removed_count: removed,
        search_space_reduction: reduction,
        simple_paths_before: count_simple_paths(before, before.start(), before.terminal(), DEFAULT_PATH_CAP),
        simple_paths_after: count_simple_paths(after, after.start(), after.terminal(), DEFAULT_PATH_CAP),
    })
}
