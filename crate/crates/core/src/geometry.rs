//! Level structure and voltage estimation.
//!
//! Nodes are grouped by BFS level. For each pair of consecutive levels the
//! crossing edges give a minimum and an average cost. The sum of the minima
//! (the ST length) is an upper bound for the driving voltage, and the averages
//! split the ST length into one segment per level pair, locating an ideal point
//! for each level along it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitSolution;
use crate::graph::{LevelAssignment, NodeId, WeightedMultiGraph};
use crate::number::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct LevelEdge {
    pub id: usize,
    pub levels: (usize, usize),
}

/// Nodes grouped by level with the edge list annotated by endpoint levels.
#[derive(Debug, Clone, Serialize)]
pub struct LevelUnitGraph {
    pub groups: Vec<Vec<NodeId>>,
    pub edges: Vec<LevelEdge>,
}

pub fn level_unit_graph(g: &WeightedMultiGraph, lv: &LevelAssignment) -> LevelUnitGraph {
    let mut groups = vec![Vec::new(); lv.max_level() + 1];
    for (i, name) in g.nodes().iter().enumerate() {
        groups[lv.level(i)].push(name.clone());
    }
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (lv.level(e.u), lv.level(e.v));
            LevelEdge { id: e.id, levels: (a.min(b), a.max(b)) }
        })
        .collect();
    LevelUnitGraph { groups, edges }
}

/// Statistics over the edges joining level `lower` and `lower + 1`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelPairCosts {
    pub lower: usize,
    pub min_cost: f64,
    pub avg_cost: f64,
    pub edge_count: usize,
    #[serde(skip)]
    exact_avg: BigRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterLevelCosts {
    /// One entry per level pair `(k-1, k)` for `k` in `1..=depth`.
    pub pairs: Vec<LevelPairCosts>,
    /// Edges with both endpoints on the same level, per level.
    pub same_level_counts: Vec<usize>,
}

impl InterLevelCosts {
    pub fn depth(&self) -> usize {
        self.pairs.len()
    }

    /// The average costs as the smallest integer ratio, e.g. `[8, 19]` for
    /// averages `2` and `19/4`.
    pub fn average_ratio(&self) -> Vec<BigInt> {
        let lcm = self
            .pairs
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.exact_avg.denom()));
        let scaled: Vec<BigInt> = self
            .pairs
            .iter()
            .map(|p| (p.exact_avg.clone() * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if gcd.is_zero() {
            return scaled;
        }
        scaled.into_iter().map(|x| x / &gcd).collect()
    }
}

/// Min and arithmetic mean of the crossing-edge costs for every consecutive
/// level pair up to the terminal's level. Parallel edges count individually.
pub fn inter_level_costs(g: &WeightedMultiGraph, lv: &LevelAssignment) -> InterLevelCosts {
    let depth = lv.depth();
    let mut crossing: Vec<Vec<f64>> = vec![Vec::new(); depth];
    let mut same_level_counts = vec![0; lv.max_level() + 1];
    for e in g.edges() {
        let (a, b) = (lv.level(e.u), lv.level(e.v));
        let lower = a.min(b);
        match a.abs_diff(b) {
            0 => same_level_counts[a] += 1,
            1 if lower < depth => crossing[lower].push(e.cost),
            1 => {}
            d => unreachable!("BFS levels differ by {d} across edge {}", e.id),
        }
    }
    let pairs = crossing
        .into_iter()
        .enumerate()
        .map(|(lower, costs)| {
            assert!(!costs.is_empty(), "no edge joins level {lower} and {}", lower + 1);
            let n = costs.len();
            let exact_sum = costs
                .iter()
                .fold(BigRational::zero(), |acc, &c| acc + BigRational::from_input(c));
            LevelPairCosts {
                lower,
                min_cost: costs.iter().copied().fold(f64::INFINITY, f64::min),
                avg_cost: costs.iter().sum::<f64>() / n as f64,
                edge_count: n,
                exact_avg: exact_sum / BigRational::from_integer(n.into()),
            }
        })
        .collect();
    InterLevelCosts { pairs, same_level_counts }
}

/// Sum of the per-pair minimum crossing costs.
pub fn estimate_st(c: &InterLevelCosts) -> f64 {
    c.pairs.iter().map(|p| p.min_cost).sum()
}

/// How to pick the driving voltage inside `(0, st)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum VmaxPolicy {
    Explicit(f64),
    #[default]
    HalfSt,
    /// `ceil(st) - 1`, or `st / 2` when `st <= 1`.
    LargestIntegerBelow,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoltageError {
    #[error("v_max {v_max} is outside the open interval (0, {st})")]
    OutOfInterval { v_max: f64, st: f64 },
    #[error("ST length {0} is not positive")]
    NonPositiveSt(f64),
}

pub fn select_vmax(st: f64, policy: VmaxPolicy) -> Result<f64, VoltageError> {
    if !(st > 0.0 && st.is_finite()) {
        return Err(VoltageError::NonPositiveSt(st));
    }
    let v = match policy {
        VmaxPolicy::Explicit(v) => v,
        VmaxPolicy::HalfSt => st / 2.0,
        VmaxPolicy::LargestIntegerBelow if st > 1.0 => st.ceil() - 1.0,
        VmaxPolicy::LargestIntegerBelow => st / 2.0,
    };
    if v > 0.0 && v < st {
        Ok(v)
    } else {
        Err(VoltageError::OutOfInterval { v_max: v, st })
    }
}

/// Splits `st` into one segment per level pair, proportional to the average
/// crossing costs. The last segment absorbs rounding so the sum is `st`.
pub fn segment_lengths(c: &InterLevelCosts, st: f64) -> Vec<f64> {
    let total: f64 = c.pairs.iter().map(|p| p.avg_cost).sum();
    let mut out: Vec<f64> = c.pairs.iter().map(|p| st * (p.avg_cost / total)).collect();
    if let Some((last, rest)) = out.split_last_mut() {
        *last = st - rest.iter().sum::<f64>();
    }
    out
}

/// Crossing edge whose cost is closest to a level pair's segment length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestEdge {
    pub lower: usize,
    pub segment: f64,
    pub edge: usize,
    pub cost: f64,
}

/// Heuristic path suggestion: per level pair, the crossing edge with cost
/// nearest its segment. Ties go to the lower edge id.
pub fn nearest_cost_edges(
    g: &WeightedMultiGraph,
    lv: &LevelAssignment,
    segments: &[f64],
) -> Vec<NearestEdge> {
    let mut best: Vec<Option<NearestEdge>> = vec![None; segments.len()];
    for e in g.edges() {
        let (a, b) = (lv.level(e.u), lv.level(e.v));
        let lower = a.min(b);
        if a.abs_diff(b) != 1 || lower >= segments.len() {
            continue;
        }
        let segment = segments[lower];
        let closer = match &best[lower] {
            None => true,
            Some(cur) => (e.cost - segment).abs() < (cur.cost - segment).abs(),
        };
        if closer {
            best[lower] = Some(NearestEdge { lower, segment, edge: e.id, cost: e.cost });
        }
    }
    best.into_iter().flatten().collect()
}

/// Everything the voltage-estimation phase produces.
#[derive(Debug, Clone, Serialize)]
pub struct VoltageEstimate {
    pub st_length: f64,
    pub v_max: f64,
    pub policy: VmaxPolicy,
    pub segments: Vec<f64>,
}

pub fn estimate_voltage(
    costs: &InterLevelCosts,
    policy: VmaxPolicy,
) -> Result<VoltageEstimate, VoltageError> {
    let st_length = estimate_st(costs);
    let v_max = select_vmax(st_length, policy)?;
    Ok(VoltageEstimate { st_length, v_max, policy, segments: segment_lengths(costs, st_length) })
}

/// A node drawn as a column whose height is its potential; columns of the same
/// level stand at the same position on a straight line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialColumn {
    pub node: NodeId,
    pub level: usize,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PotentialColumns {
    pub columns: Vec<PotentialColumn>,
}

/// Without a solution only the start (`v_max`) and terminal (0) columns are
/// known. Columns are ordered by level, then name.
pub fn potential_columns(
    g: &WeightedMultiGraph,
    lv: &LevelAssignment,
    solution: Option<&CircuitSolution>,
    v_max: f64,
) -> PotentialColumns {
    let mut columns: Vec<PotentialColumn> = (0..g.node_count())
        .filter_map(|i| {
            let node = g.name(i);
            let height = match solution {
                Some(s) => s.potential(node.as_str())?.value,
                None if i == g.start() => v_max,
                None if i == g.terminal() => 0.0,
                None => return None,
            };
            Some(PotentialColumn { node: node.clone(), level: lv.level(i), height })
        })
        .collect();
    columns.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.node.cmp(&b.node)));
    PotentialColumns { columns }
}
