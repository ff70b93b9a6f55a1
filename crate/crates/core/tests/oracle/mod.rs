//! Reference computations that share no code path with the library solvers.
//!
//! Potentials come from Cramer's rule with determinants by cofactor expansion
//! over exact rationals; path minima from exhaustive simple-path enumeration.
#![allow(dead_code)]

use kirchhoff_core::WeightedMultiGraph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

/// Exact rational for an integer or short decimal cost, parsed from its text.
pub fn rational(x: f64) -> Q {
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let numer: BigInt = format!("{int}{frac}").parse().unwrap();
    Q::new(numer, BigInt::from(10).pow(frac.len() as u32))
}

fn determinant(m: &[Vec<Q>]) -> Q {
    match m.len() {
        0 => Q::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .filter(|&c| !m[0][c].is_zero())
            .map(|c| {
                let minor: Vec<Vec<Q>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][c].clone() * determinant(&minor);
                if c % 2 == 0 { term } else { -term }
            })
            .fold(Q::zero(), |a, b| a + b),
    }
}

/// Potentials of every node (by node index) with start at `v_max` and
/// terminal at 0. The graph must be connected.
pub fn cramer_potentials(g: &WeightedMultiGraph, v_max: &Q) -> Vec<Q> {
    let n = g.node_count();
    // full Laplacian
    let mut lap = vec![vec![Q::zero(); n]; n];
    for e in g.edges() {
        let c = Q::one() / rational(e.cost);
        lap[e.u][e.u] += c.clone();
        lap[e.v][e.v] += c.clone();
        lap[e.u][e.v] -= c.clone();
        lap[e.v][e.u] -= c;
    }
    let (s, t) = (g.start(), g.terminal());
    let free: Vec<usize> = (0..n).filter(|&i| i != s && i != t).collect();
    let a: Vec<Vec<Q>> = free.iter().map(|&i| free.iter().map(|&j| lap[i][j].clone()).collect()).collect();
    let b: Vec<Q> = free.iter().map(|&i| -lap[i][s].clone() * v_max.clone()).collect();
    let det = determinant(&a);
    let mut out = vec![Q::zero(); n];
    out[s] = v_max.clone();
    for (k, &node) in free.iter().enumerate() {
        let mut ak = a.clone();
        for (row, bv) in ak.iter_mut().zip(&b) {
            row[k] = bv.clone();
        }
        out[node] = determinant(&ak) / det.clone();
    }
    out
}

/// Cost of every simple path from start to terminal.
pub fn all_path_costs(g: &WeightedMultiGraph) -> Vec<f64> {
    fn walk(g: &WeightedMultiGraph, at: usize, cost: f64, seen: &mut Vec<bool>, out: &mut Vec<f64>) {
        if at == g.terminal() {
            out.push(cost);
            return;
        }
        seen[at] = true;
        for e in g.edges() {
            let next = if e.u == at { e.v } else if e.v == at { e.u } else { continue };
            if !seen[next] {
                walk(g, next, cost + e.cost, seen, out);
            }
        }
        seen[at] = false;
    }
    let mut out = Vec::new();
    walk(g, g.start(), 0.0, &mut vec![false; g.node_count()], &mut out);
    out
}
