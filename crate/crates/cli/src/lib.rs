//! `kirchhoff` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage, input and validation errors, 2 when
//! the linear system turns out to be numerically singular.

pub mod dot;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kirchhoff_core::geometry::{LevelPairCosts, NearestEdge, PotentialColumn};
use kirchhoff_core::simplify::DEFAULT_ZERO_TOLERANCE;
use kirchhoff_core::{
    compare, compute_levels, estimate_voltage, inter_level_costs, level_unit_graph,
    nearest_cost_edges, parse_graph, potential_columns, simplify, solve_circuit, validate,
    zero_current_edges, CircuitError, CircuitSolution, GraphError, LevelError, NodeId, NumberMode,
    PathComparison, PathError, Quantity, SimplifyConfig, SimplifyError, VmaxPolicy, VoltageError,
    WeightedMultiGraph,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use dot::export_dot;

#[derive(Debug, Parser)]
#[command(name = "kirchhoff", version, about = "Simplify weighted graphs for path-finding by solving them as resistor networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Levels, inter-level costs, ST bound, voltage and segment lengths.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        voltage: VoltageArgs,
        /// Solve the circuit so every potential column has a height.
        #[arg(long)]
        potentials: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Node potentials, edge currents and Kirchhoff residuals.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        voltage: VoltageArgs,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove zero-current edges; writes the simplified graph and a JSON report.
    Simplify {
        input: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Simplified graph destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report destination. Without it the report goes to standard
        /// output when `--out` is given and is skipped otherwise.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Shortest path before and after simplification.
    Compare {
        before: PathBuf,
        /// Already simplified graph; when omitted, `before` is simplified.
        after: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        json: bool,
    },
    /// Graphviz DOT rendering, optionally annotated with the circuit solution.
    ExportDot {
        input: PathBuf,
        #[arg(long)]
        annotate: bool,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyName {
    Half,
    Int,
    Explicit,
}

#[derive(Debug, Clone, Args)]
pub struct VoltageArgs {
    /// Driving voltage; must lie strictly between 0 and the ST length.
    #[arg(long)]
    vmax: Option<f64>,
    /// half = ST/2, int = largest integer below ST, explicit = use --vmax.
    #[arg(long, value_enum)]
    vmax_policy: Option<PolicyName>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    voltage: VoltageArgs,
    /// Zero-current tolerance relative to the largest edge current.
    #[arg(long, default_value_t = DEFAULT_ZERO_TOLERANCE)]
    tol: f64,
    /// Exact rational arithmetic.
    #[arg(long)]
    exact: bool,
}

impl VoltageArgs {
    fn policy(&self) -> Result<VmaxPolicy, CliError> {
        match (self.vmax_policy, self.vmax) {
            (None | Some(PolicyName::Explicit), Some(v)) => Ok(VmaxPolicy::Explicit(v)),
            (Some(PolicyName::Explicit), None) => {
                Err(CliError::Usage("--vmax-policy explicit requires --vmax".into()))
            }
            (Some(PolicyName::Half | PolicyName::Int), Some(_)) => Err(CliError::Usage(
                "--vmax can only be combined with --vmax-policy explicit".into(),
            )),
            (None | Some(PolicyName::Half), None) => Ok(VmaxPolicy::HalfSt),
            (Some(PolicyName::Int), None) => Ok(VmaxPolicy::LargestIntegerBelow),
        }
    }
}

fn mode(exact: bool) -> NumberMode {
    if exact {
        NumberMode::ExactRational
    } else {
        NumberMode::Float64
    }
}

impl SolveArgs {
    fn config(&self) -> Result<SimplifyConfig, CliError> {
        Ok(SimplifyConfig {
            vmax_policy: self.voltage.policy()?,
            number_mode: mode(self.exact),
            zero_tolerance: self.tol,
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GraphError },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Voltage(#[from] VoltageError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("cannot encode output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Circuit(CircuitError::Singular(_) | CircuitError::ZeroCurrent)
            | CliError::Simplify(SimplifyError::Circuit(
                CircuitError::Singular(_) | CircuitError::ZeroCurrent,
            )) => 2,
            _ => 1,
        }
    }
}

/// Every JSON document carries the tool version and a digest of its input.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'static str,
    input_digest: &'a str,
    #[serde(flatten)]
    body: T,
}

struct Input {
    graph: WeightedMultiGraph,
    digest: String,
}

fn load(path: &Path) -> Result<Input, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let graph = parse_graph(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    let outcome = validate(&graph);
    if !outcome.is_valid() {
        let msgs: Vec<String> = outcome.violations.iter().map(ToString::to_string).collect();
        return Err(CliError::Invalid(msgs.join("; ")));
    }
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())));
    Ok(Input { graph, digest })
}

fn json<T: Serialize>(digest: &str, body: T) -> Result<String, CliError> {
    let envelope = Envelope { tool_version: env!("CARGO_PKG_VERSION"), input_digest: digest, body };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    Ok(text)
}

fn emit(text: &str, dest: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

#[derive(Serialize)]
struct PairJson {
    levels: (usize, usize),
    min: f64,
    avg: f64,
    count: usize,
}

impl From<&LevelPairCosts> for PairJson {
    fn from(p: &LevelPairCosts) -> Self {
        Self { levels: (p.lower, p.lower + 1), min: p.min_cost, avg: p.avg_cost, count: p.edge_count }
    }
}

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    levels: BTreeMap<&'a NodeId, usize>,
    level_groups: Vec<Vec<NodeId>>,
    inter_level_costs: Vec<PairJson>,
    average_cost_ratio: Vec<String>,
    same_level_edge_counts: Vec<usize>,
    st_length: f64,
    v_max: f64,
    vmax_policy: VmaxPolicy,
    segments: Vec<f64>,
    nearest_cost_edges: Vec<NearestEdge>,
    potential_columns: Vec<PotentialColumn>,
}

#[derive(Serialize)]
struct CurrentJson<'a> {
    u: &'a NodeId,
    v: &'a NodeId,
    cost: f64,
    current: &'a Quantity,
}

#[derive(Serialize)]
struct SolveJson<'a> {
    number_mode: NumberMode,
    v_max: &'a Quantity,
    potentials: &'a BTreeMap<String, Quantity>,
    floating_nodes: &'a [String],
    currents: BTreeMap<usize, CurrentJson<'a>>,
    total_current: &'a Quantity,
    effective_resistance: &'a Quantity,
    kcl_residual: &'a Quantity,
    kvl_residual: &'a Quantity,
}

fn solve_json<'a>(g: &'a WeightedMultiGraph, s: &'a CircuitSolution) -> SolveJson<'a> {
    let currents = g
        .edges()
        .iter()
        .map(|e| {
            let entry = CurrentJson { u: g.name(e.u), v: g.name(e.v), cost: e.cost, current: s.current(e.id) };
            (e.id, entry)
        })
        .collect();
    SolveJson {
        number_mode: s.number_mode,
        v_max: &s.v_max,
        potentials: &s.potentials,
        floating_nodes: &s.floating_nodes,
        currents,
        total_current: &s.total_current,
        effective_resistance: &s.effective_resistance,
        kcl_residual: &s.kcl_residual,
        kvl_residual: &s.kvl_residual,
    }
}

fn analyze(input: &Input, voltage: &VoltageArgs, with_potentials: bool) -> Result<String, CliError> {
    let g = &input.graph;
    let lv = compute_levels(g)?;
    let costs = inter_level_costs(g, &lv);
    let estimate = estimate_voltage(&costs, voltage.policy()?)?;
    let solution = if with_potentials {
        Some(solve_circuit(g, estimate.v_max, NumberMode::Float64)?)
    } else {
        None
    };
    let body = AnalyzeJson {
        levels: lv.by_name(g),
        level_groups: level_unit_graph(g, &lv).groups,
        inter_level_costs: costs
            .pairs
            .iter()
            .map(PairJson::from)
            .collect(),
        average_cost_ratio: costs.average_ratio().iter().map(ToString::to_string).collect(),
        same_level_edge_counts: costs.same_level_counts.clone(),
        st_length: estimate.st_length,
        v_max: estimate.v_max,
        vmax_policy: estimate.policy,
        nearest_cost_edges: nearest_cost_edges(g, &lv, &estimate.segments),
        segments: estimate.segments,
        potential_columns: potential_columns(g, &lv, solution.as_ref(), estimate.v_max).columns,
    };
    json(&input.digest, body)
}

/// Voltage for commands that solve without simplifying: the policy applied to
/// the graph's ST length.
fn voltage_for(g: &WeightedMultiGraph, voltage: &VoltageArgs) -> Result<f64, CliError> {
    let lv = compute_levels(g)?;
    Ok(estimate_voltage(&inter_level_costs(g, &lv), voltage.policy()?)?.v_max)
}

fn comparison_table(c: &PathComparison) -> String {
    let path = |p: &kirchhoff_core::PathResult| {
        p.nodes.iter().map(NodeId::as_str).collect::<Vec<_>>().join("-")
    };
    let rows = [
        ("shortest path", path(&c.before), path(&c.after)),
        ("path cost", format!("{}", c.before.cost), format!("{}", c.after.cost)),
        (
            "simple paths",
            c.simple_paths_before.to_string(),
            c.simple_paths_after.to_string(),
        ),
    ];
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("before".len());
    let w2 = rows.iter().map(|r| r.2.len()).max().unwrap_or(0).max("after".len());
    let mut out = format!("{:<14}  {:>w1$}  {:>w2$}\n", "", "before", "after");
    for (label, b, a) in rows {
        out += &format!("{label:<14}  {b:>w1$}  {a:>w2$}\n");
    }
    out += &format!("edges removed:          {}\n", c.edges_removed_count);
    out += &format!("search space reduction: {:.4}\n", c.search_space_reduction);
    out += &format!("cost preserved:         {}\n", if c.cost_preserved { "yes" } else { "no" });
    out
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { input, voltage, potentials, out } => {
            let input = load(&input)?;
            emit(&analyze(&input, &voltage, potentials)?, out.as_deref(), stdout)
        }
        Command::Solve { input, voltage, exact, out } => {
            let input = load(&input)?;
            let v_max = voltage_for(&input.graph, &voltage)?;
            let solution = solve_circuit(&input.graph, v_max, mode(exact))?;
            emit(&json(&input.digest, solve_json(&input.graph, &solution))?, out.as_deref(), stdout)
        }
        Command::Simplify { input, solve, out, report } => {
            let input = load(&input)?;
            let result = simplify(&input.graph, &solve.config()?)?;
            for w in &result.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            emit(&result.simplified_graph.to_text(), out.as_deref(), stdout)?;
            let report_text = json(&input.digest, &result)?;
            match (report, out) {
                (Some(path), _) => emit(&report_text, Some(&path), stdout),
                (None, Some(_)) => emit(&report_text, None, stdout),
                (None, None) => Ok(()),
            }
        }
        Command::Compare { before, after, solve, json: as_json } => {
            let before = load(&before)?;
            let after_graph = match after {
                Some(path) => load(&path)?.graph,
                None => simplify(&before.graph, &solve.config()?)?.simplified_graph,
            };
            let comparison = compare(&before.graph, &after_graph)?;
            let text = if as_json {
                json(&before.digest, &comparison)?
            } else {
                comparison_table(&comparison)
            };
            emit(&text, None, stdout)
        }
        Command::ExportDot { input, annotate, solve, out } => {
            let input = load(&input)?;
            let text = if annotate {
                let cfg = solve.config()?;
                cfg.check()?;
                let v_max = voltage_for(&input.graph, &solve.voltage)?;
                let solution = solve_circuit(&input.graph, v_max, cfg.number_mode)?;
                let zero = zero_current_edges(&solution, &cfg);
                export_dot(&input.graph, Some((&solution, &zero)))
            } else {
                export_dot(&input.graph, None)
            };
            emit(&text, out.as_deref(), stdout)
        }
    }
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let rendered = err.render().to_string();
            let _ = if err.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}
