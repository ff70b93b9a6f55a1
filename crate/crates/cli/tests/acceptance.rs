//! Acceptance suite: one line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

use kirchhoff_core::generate::{random_graph, RandomGraph, RandomGraphSpec};
use kirchhoff_core::{
    count_simple_paths, fixtures, parse_graph, simplify, solve_circuit, NumberMode,
    SimplificationReport, SimplifyConfig, VmaxPolicy, WeightedMultiGraph,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn case_study() -> WeightedMultiGraph {
    parse_graph(fixtures::CASE_STUDY).unwrap()
}

fn run_case(mode: NumberMode) -> SimplificationReport {
    let cfg = SimplifyConfig { number_mode: mode, ..SimplifyConfig::default() }
        .with_policy(VmaxPolicy::Explicit(3.0));
    simplify(&case_study(), &cfg).unwrap()
}

fn edge_id(g: &WeightedMultiGraph, a: &str, b: &str, cost: f64) -> usize {
    g.edges()
        .iter()
        .find(|e| {
            let ends = [g.name(e.u).as_str(), g.name(e.v).as_str()];
            ends.contains(&a) && ends.contains(&b) && e.cost == cost
        })
        .map(|e| e.id)
        .unwrap()
}

/// The six loop currents of the worked example, in order I1..I6.
fn loop_edges(g: &WeightedMultiGraph) -> [usize; 6] {
    [
        edge_id(g, "S", "c", 1.0),
        edge_id(g, "S", "a", 2.0),
        edge_id(g, "S", "b", 3.0),
        edge_id(g, "a", "T", 4.0),
        edge_id(g, "c", "b", 4.0),
        edge_id(g, "c", "T", 6.0),
    ]
}

fn case_study_pipeline() -> Outcome {
    let g = case_study();
    let r = run_case(NumberMode::ExactRational);
    ensure!(r.voltage.st_length == 4.0, "ST = {}", r.voltage.st_length);
    let ratio: Vec<String> = r.inter_level_costs.average_ratio().iter().map(ToString::to_string).collect();
    ensure!(ratio == ["8", "19"], "ratio {ratio:?}");
    let seg = &r.voltage.segments;
    ensure!(
        seg.len() == 2 && (seg[0] - 1.185).abs() <= 1e-3 && (seg[1] - 2.815).abs() <= 1e-3,
        "segments {seg:?}"
    );

    let currents: Vec<BigRational> = loop_edges(&g)
        .iter()
        .map(|&id| r.circuit.current(id).exact.clone().unwrap())
        .collect();
    let magnitudes: Vec<BigRational> = currents.iter().map(num_traits::Signed::abs).collect();
    let want = [q(1, 1), q(1, 2), q(1, 3), q(1, 2), q(0, 1), q(1, 3)];
    ensure!(magnitudes == want, "loop currents {magnitudes:?}");
    // the worked example's six loop equations hold for these currents
    let i = &magnitudes;
    let three = q(3, 1);
    let lhs = [
        q(2, 1) * &i[1] + q(4, 1) * &i[3],
        &i[0] + q(6, 1) * &i[5],
        &i[0] + q(3, 1) * (&i[0] - &i[4] - &i[5]),
        q(3, 1) * &i[2] + q(6, 1) * (&i[1] + &i[2] - &i[3] + &i[4]),
        q(3, 1) * &i[2] - q(4, 1) * &i[4] - &i[0],
        q(2, 1) * &i[1] + (&i[1] - &i[3]) - q(3, 1) * &i[2],
    ];
    let rhs = [three.clone(), three.clone(), three.clone(), three, q(0, 1), q(0, 1)];
    ensure!(lhs == rhs, "loop equations {lhs:?}");

    let removed: BTreeSet<(String, String)> =
        r.removed_edges.iter().map(|e| (e.u.clone(), e.v.clone())).collect();
    let want_removed: BTreeSet<(String, String)> =
        [("a", "b"), ("b", "c")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure!(removed == want_removed, "removed {removed:?}");
    let after = &r.simplified_graph;
    ensure!((after.node_count(), after.edge_count()) == (5, 7), "G* size");
    let paths = count_simple_paths(after, after.start(), after.terminal(), 1_000_000);
    ensure!(paths == 4, "{paths} simple paths in G*");

    // float mode within 1e-9 relative
    let f = run_case(NumberMode::Float64);
    ensure!(f.removed_ids() == r.removed_ids(), "float removed {:?}", f.removed_ids());
    for (&id, w) in loop_edges(&g).iter().zip(&want) {
        let (got, w) = (f.circuit.current(id).value.abs(), w.to_f64().unwrap());
        ensure!((got - w).abs() <= 1e-9 * w.max(f.circuit.max_abs_current()), "float current {got} vs {w}");
    }
    Ok(format!("ST=4, ratio 8:19, segments [{:.3}, {:.3}], removed a-b c-b, G*(5,7), 4 paths", seg[0], seg[1]))
}

fn potentials_fixture() -> Outcome {
    let r = run_case(NumberMode::ExactRational);
    for (name, v) in [("S", 3), ("a", 2), ("b", 2), ("c", 2), ("T", 0)] {
        let got = r.circuit.potential(name).and_then(|p| p.exact.clone());
        ensure!(got == Some(q(v, 1)), "V_{name} = {got:?}");
    }
    Ok("{S:3, a:2, b:2, c:2, T:0}".into())
}

fn effective_resistance() -> Outcome {
    let r = run_case(NumberMode::ExactRational);
    ensure!(r.circuit.effective_resistance.exact == Some(q(18, 11)), "R_eff {:?}", r.circuit.effective_resistance);
    let resolve = r.resolve.as_ref().ok_or("no re-solve")?;
    ensure!(resolve.effective_resistance.exact == Some(q(18, 11)), "G* R_eff {:?}", resolve.effective_resistance);
    Ok("18/11 before and after removal".into())
}

/// 100 random connected graphs, at most 60 nodes, integer costs in 1..=20.
fn ensemble() -> Vec<RandomGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..100)
        .map(|_| {
            let core = rng.random_range(2..=50);
            let spec = RandomGraphSpec {
                core_nodes: core,
                extra_edges: rng.random_range(0..=2 * core),
                dead_end_nodes: rng.random_range(0..=10),
                max_cost: 20,
            };
            random_graph(&mut rng, &spec)
        })
        .collect()
}

fn vmax_invariance(graphs: &[RandomGraph]) -> Outcome {
    let mut removed_total = 0;
    for (k, r) in graphs.iter().enumerate() {
        let g = &r.graph;
        ensure!(g.node_count() <= 60, "graph {k} has {} nodes", g.node_count());
        let base = simplify(g, &SimplifyConfig::default()).unwrap();
        let st = base.voltage.st_length;
        let sets: Vec<BTreeSet<usize>> = [st / 4.0, st / 2.0, 3.0 * st / 4.0]
            .iter()
            .map(|&v| {
                simplify(g, &SimplifyConfig::default().with_policy(VmaxPolicy::Explicit(v)))
                    .unwrap()
                    .removed_ids()
            })
            .collect();
        ensure!(sets[0] == sets[1] && sets[1] == sets[2], "graph {k}: zero sets differ {sets:?}");
        removed_total += sets[0].len();
    }
    Ok(format!("{} graphs, {removed_total} zero-current edges, identical across ST/4, ST/2, 3ST/4", graphs.len()))
}

fn small_graphs(count: usize, max_nodes: usize, seed: u64) -> Vec<WeightedMultiGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dead = rng.random_range(0..=max_nodes / 4);
            let core = rng.random_range(2..=max_nodes - dead);
            let spec = RandomGraphSpec {
                core_nodes: core,
                extra_edges: rng.random_range(0..=core + 2),
                dead_end_nodes: dead,
                max_cost: 20,
            };
            random_graph(&mut rng, &spec).graph
        })
        .collect()
}

fn kirchhoff_residuals(graphs: &[RandomGraph]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, r) in graphs.iter().enumerate() {
        let s = solve_circuit(&r.graph, 1.0, NumberMode::Float64).unwrap();
        ensure!(s.kcl_residual.value <= 1e-10, "graph {k}: KCL {}", s.kcl_residual.value);
        ensure!(s.kvl_residual.value <= 1e-10, "graph {k}: KVL {}", s.kvl_residual.value);
        worst = worst.max(s.kcl_residual.value).max(s.kvl_residual.value);
    }
    let mut exact_count = 0;
    let small = graphs.iter().map(|r| r.graph.clone()).filter(|g| g.node_count() <= 20);
    for (k, g) in small.chain(small_graphs(60, 20, 77)).enumerate() {
        let s = solve_circuit(&g, 3.0, NumberMode::ExactRational).unwrap();
        ensure!(s.kcl_residual.is_zero() && s.kvl_residual.is_zero(), "exact graph {k}: non-zero residual");
        exact_count += 1;
    }
    Ok(format!("float worst {worst:.2e} over {} graphs; exact zero on {exact_count} graphs <= 20 nodes", graphs.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let core = rng.random_range(2..=6);
        let spec = RandomGraphSpec {
            core_nodes: core,
            extra_edges: rng.random_range(0..=core * (core - 1) / 2),
            dead_end_nodes: 0,
            max_cost: 3,
        };
        let g = random_graph(&mut rng, &spec).graph;
        let want = oracle::cramer_potentials(&g, &oracle::rational(3.0));
        let s = solve_circuit(&g, 3.0, NumberMode::Float64).unwrap();
        for (i, w) in want.iter().enumerate() {
            let got = s.potential(g.name(i).as_str()).unwrap().value;
            let w = w.to_f64().unwrap();
            let err = (got - w).abs() / 3.0;
            ensure!(err <= 1e-9, "instance {k}: node {} {got} vs {w}", g.name(i));
            worst = worst.max(err);
        }
    }
    Ok(format!("500 instances, worst relative error {worst:.2e}"))
}

fn structural(graphs: &[RandomGraph]) -> Outcome {
    let g = parse_graph(fixtures::WHEATSTONE).unwrap();
    for cfg in [SimplifyConfig::default(), SimplifyConfig::default().exact()] {
        let removed = simplify(&g, &cfg).unwrap().removed_ids();
        ensure!(removed == BTreeSet::from([edge_id(&g, "p", "q", 7.0)]), "bridge removal {removed:?}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for len in 1..=12 {
        let mut text = String::from("start v0\n");
        for i in 0..len {
            text += &format!("edge v{i} v{} {}\n", i + 1, rng.random_range(1..=20));
        }
        text += &format!("terminal v{len}\n");
        let g = parse_graph(&text).unwrap();
        for cfg in [SimplifyConfig::default(), SimplifyConfig::default().exact()] {
            let r = simplify(&g, &cfg).unwrap();
            ensure!(r.removed_edges.is_empty(), "chain of {len} lost edges");
        }
    }

    let mut dead_ends = 0;
    for (k, r) in graphs.iter().enumerate() {
        let removed = simplify(&r.graph, &SimplifyConfig::default()).unwrap().removed_ids();
        for id in &r.dead_end_edges {
            ensure!(removed.contains(id), "graph {k}: dead-end edge {id} kept");
        }
        dead_ends += r.dead_end_edges.len();
    }

    let mut exact_runs = 0;
    let small = graphs.iter().map(|r| r.graph.clone()).filter(|g| g.node_count() <= 20);
    for g in small.chain(small_graphs(60, 20, 78)) {
        let r = simplify(&g, &SimplifyConfig::default().exact()).unwrap();
        let after = &r.simplified_graph;
        ensure!(after.hop_distances(after.start())[after.terminal()].is_some(), "exact run disconnected");
        ensure!(r.warnings.is_empty(), "warnings {:?}", r.warnings);
        exact_runs += 1;
    }
    Ok(format!(
        "bridge removed alone; 12 chains intact; {dead_ends} dead-end edges removed; {exact_runs} exact runs stay connected"
    ))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kirchhoff"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let graph = dir.path().join("case.graph");
    std::fs::write(&graph, fixtures::CASE_STUDY).map_err(|e| e.to_string())?;
    let graph = graph.to_str().unwrap();
    let report = |n: usize| dir.path().join(format!("r{n}.json"));
    let mut checked = 0;
    for n in 0..2 {
        let r = report(n);
        cli(&["simplify", graph, "--vmax", "3", "--exact", "--report", r.to_str().unwrap(), "--out", "/dev/null"])?;
    }
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    let (a, b) = (read(&report(0))?, read(&report(1))?);
    ensure!(a == b, "simplify reports differ");
    let parsed: serde_json::Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
    ensure!(parsed["removed_edges"].as_array().map(Vec::len) == Some(2), "report lacks 2 removed edges");
    checked += 1;
    for args in [
        vec!["analyze", graph],
        vec!["solve", graph, "--exact"],
        vec!["solve", graph],
        vec!["simplify", graph],
        vec!["compare", graph, "--json"],
        vec!["export-dot", graph, "--annotate"],
    ] {
        ensure!(cli(&args)? == cli(&args)?, "{args:?} output differs between runs");
        checked += 1;
    }
    Ok(format!("{checked} invocations byte-identical across repeated runs"))
}

fn main() {
    let graphs = ensemble();
    let criteria: Vec<Criterion> = vec![
        ("1 case-study pipeline", Box::new(case_study_pipeline)),
        ("2 potentials fixture", Box::new(potentials_fixture)),
        ("3 effective resistance", Box::new(effective_resistance)),
        ("4 v_max invariance", Box::new(|| vmax_invariance(&graphs))),
        ("5 Kirchhoff residuals", Box::new(|| kirchhoff_residuals(&graphs))),
        ("6 oracle equivalence", Box::new(oracle_equivalence)),
        ("7 structural properties", Box::new(|| structural(&graphs))),
        ("8 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
