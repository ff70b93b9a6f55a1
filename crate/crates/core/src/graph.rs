//! Weighted undirected multigraph with a designated start and terminal node.
//!
//! Nodes are kept in sorted (lexicographic) order and addressed internally by
//! their position in that order, so every traversal in the crate is
//! deterministic regardless of how the input was written. Edges keep the id
//! they were given at construction time (file order when parsed).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of a node. Non-empty, no whitespace, no `#`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if !is_valid_name(&name) {
            return Err(GraphError::InvalidName(name));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '#')
}

/// An undirected edge. `u` and `v` are node indices with `u <= v`, so the
/// positive current direction (smaller name to larger name) is `u -> v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub cost: f64,
}

impl Edge {
    /// The endpoint opposite `node`. `node` must be one of the endpoints.
    pub fn other(&self, node: usize) -> usize {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node `{name}` declared more than once")]
    DuplicateNode { line: usize, name: String },
    #[error("line {line}: unknown node `{name}`")]
    UnknownNode { line: usize, name: String },
    #[error("line {line}: cost `{text}` is not a number")]
    NonNumericCost { line: usize, text: String },
    #[error("line {line}: cost {cost} must be a finite positive number")]
    CostDomain { line: usize, cost: f64 },
    #[error("line {line}: self-loop on `{name}`")]
    SelfLoop { line: usize, name: String },
    #[error("line {line}: `{directive}` given more than once")]
    RepeatedDirective { line: usize, directive: &'static str },
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("start and terminal are the same node `{0}`")]
    StartIsTerminal(String),
    #[error("invalid node name `{0}`")]
    InvalidName(String),
    #[error("invalid graph: {0}")]
    Invalid(Violation),
}

/// One broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonPositiveCost { edge: usize, cost: f64 },
    SelfLoop { edge: usize, node: String },
    StartIsTerminal,
    TerminalUnreachable,
    EdgeIdsNotDense { position: usize, id: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveCost { edge, cost } => {
                write!(f, "non-positive cost {cost} on edge {edge}")
            }
            Violation::SelfLoop { edge, node } => write!(f, "self-loop on `{node}` (edge {edge})"),
            Violation::StartIsTerminal => f.write_str("start equals terminal"),
            Violation::TerminalUnreachable => f.write_str("terminal unreachable from start"),
            Violation::EdgeIdsNotDense { position, id } => {
                write!(f, "edge at position {position} has id {id}")
            }
        }
    }
}

/// Result of [`validate`]: empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationOutcome {
    pub violations: Vec<Violation>,
}

impl ValidationOutcome {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMultiGraph {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    start: usize,
    terminal: usize,
    adjacency: Vec<Vec<usize>>,
}

impl WeightedMultiGraph {
    /// Assembles a graph without checking costs, self-loops or start/terminal
    /// distinctness; run [`validate`] before handing it to the algorithms.
    ///
    /// Node names are sorted and deduplicated. Edge endpoints and start/terminal
    /// must name nodes in `nodes`, otherwise this panics.
    pub fn from_parts_unchecked(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
        start: &NodeId,
        terminal: &NodeId,
    ) -> Self {
        let nodes: Vec<NodeId> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let lookup = |n: &NodeId| {
            nodes
                .binary_search(n)
                .unwrap_or_else(|_| panic!("node `{n}` is not part of the graph"))
        };
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, (a, b, cost))| {
                let (a, b) = (lookup(&a), lookup(&b));
                Edge { id, u: a.min(b), v: a.max(b), cost }
            })
            .collect();
        let (start, terminal) = (lookup(start), lookup(terminal));
        Self::assemble(nodes, edges, start, terminal)
    }

    fn assemble(nodes: Vec<NodeId>, edges: Vec<Edge>, start: usize, terminal: usize) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (pos, e) in edges.iter().enumerate() {
            adjacency[e.u].push(pos);
            if e.v != e.u {
                adjacency[e.v].push(pos);
            }
        }
        Self { nodes, edges, start, terminal, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted node names; a node's index is its position here.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn name(&self, index: usize) -> &NodeId {
        &self.nodes[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn terminal(&self) -> usize {
        self.terminal
    }

    /// Positions (into [`edges`](Self::edges)) of the edges incident to `node`.
    pub fn incident(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Graph with the same nodes, start and terminal but a new edge list.
    /// Edges are renumbered `0..` in the order given.
    pub(crate) fn with_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, e)| Edge { id, ..e })
            .collect();
        Self::assemble(self.nodes.clone(), edges, self.start, self.terminal)
    }

    /// Unweighted BFS distance from `from` to every node (`None` if unreachable).
    pub fn hop_distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let d = dist[n].unwrap_or_default();
            for &pos in &self.adjacency[n] {
                let m = self.edges[pos].other(n);
                if dist[m].is_none() {
                    dist[m] = Some(d + 1);
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// Graph file text: sorted nodes, start, terminal, edges by id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(out, "node {n}");
        }
        let _ = writeln!(out, "start {}", self.nodes[self.start]);
        let _ = writeln!(out, "terminal {}", self.nodes[self.terminal]);
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} {}", self.nodes[e.u], self.nodes[e.v], e.cost);
        }
        out
    }
}

impl fmt::Display for WeightedMultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Incremental construction by node name; nodes are declared implicitly by
/// edges.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: Vec<(NodeId, NodeId, f64)>,
    start: Option<NodeId>,
    terminal: Option<NodeId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, name: &str) -> Result<Self, GraphError> {
        self.nodes.insert(NodeId::new(name)?);
        Ok(self)
    }

    pub fn edge(mut self, a: &str, b: &str, cost: f64) -> Result<Self, GraphError> {
        let (a, b) = (NodeId::new(a)?, NodeId::new(b)?);
        self.nodes.insert(a.clone());
        self.nodes.insert(b.clone());
        self.edges.push((a, b, cost));
        Ok(self)
    }

    pub fn start(mut self, name: &str) -> Result<Self, GraphError> {
        let id = NodeId::new(name)?;
        self.nodes.insert(id.clone());
        self.start = Some(id);
        Ok(self)
    }

    pub fn terminal(mut self, name: &str) -> Result<Self, GraphError> {
        let id = NodeId::new(name)?;
        self.nodes.insert(id.clone());
        self.terminal = Some(id);
        Ok(self)
    }

    /// Checks the structural invariants (positive costs, no self-loops,
    /// distinct start/terminal). Connectivity is left to [`validate`].
    pub fn build(self) -> Result<WeightedMultiGraph, GraphError> {
        let start = self.start.ok_or(GraphError::MissingDirective("start"))?;
        let terminal = self.terminal.ok_or(GraphError::MissingDirective("terminal"))?;
        let g = WeightedMultiGraph::from_parts_unchecked(self.nodes, self.edges, &start, &terminal);
        match structural_violations(&g).into_iter().next() {
            Some(Violation::StartIsTerminal) => Err(GraphError::StartIsTerminal(start.0)),
            Some(v) => Err(GraphError::Invalid(v)),
            None => Ok(g),
        }
    }
}

fn structural_violations(g: &WeightedMultiGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if g.start == g.terminal {
        out.push(Violation::StartIsTerminal);
    }
    for (position, e) in g.edges.iter().enumerate() {
        if e.id != position {
            out.push(Violation::EdgeIdsNotDense { position, id: e.id });
        }
        if !(e.cost > 0.0 && e.cost.is_finite()) {
            out.push(Violation::NonPositiveCost { edge: e.id, cost: e.cost });
        }
        if e.u == e.v {
            out.push(Violation::SelfLoop { edge: e.id, node: g.nodes[e.u].0.clone() });
        }
    }
    out
}

/// Checks every graph invariant plus start/terminal connectivity.
pub fn validate(g: &WeightedMultiGraph) -> ValidationOutcome {
    let mut violations = structural_violations(g);
    if g.start != g.terminal && g.hop_distances(g.start)[g.terminal].is_none() {
        violations.push(Violation::TerminalUnreachable);
    }
    ValidationOutcome { violations }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # comment
/// node <name>
/// start <name>
/// terminal <name>
/// edge <name> <name> <cost>
/// ```
pub fn parse_graph(text: &str) -> Result<WeightedMultiGraph, GraphError> {
    let mut declared: BTreeMap<String, usize> = BTreeMap::new();
    let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
    let mut edges = Vec::new();
    let mut start: Option<(usize, NodeId)> = None;
    let mut terminal: Option<(usize, NodeId)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or_default();
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&directive, args)) = tokens.split_first() else {
            continue;
        };
        let syntax = |message: String| GraphError::Syntax { line, message };
        let name = |s: &str| NodeId::new(s).map_err(|_| syntax(format!("invalid node name `{s}`")));
        match (directive, args) {
            ("node", [n]) => {
                if declared.insert(n.to_string(), line).is_some() {
                    return Err(GraphError::DuplicateNode { line, name: n.to_string() });
                }
                nodes.insert(name(n)?);
            }
            ("start", [n]) | ("terminal", [n]) => {
                let slot = if directive == "start" { &mut start } else { &mut terminal };
                if slot.is_some() {
                    let directive = if directive == "start" { "start" } else { "terminal" };
                    return Err(GraphError::RepeatedDirective { line, directive });
                }
                *slot = Some((line, name(n)?));
            }
            ("edge", [a, b, cost]) => {
                let (a, b) = (name(a)?, name(b)?);
                let cost: f64 = cost
                    .parse()
                    .map_err(|_| GraphError::NonNumericCost { line, text: cost.to_string() })?;
                if !(cost > 0.0 && cost.is_finite()) {
                    return Err(GraphError::CostDomain { line, cost });
                }
                if a == b {
                    return Err(GraphError::SelfLoop { line, name: a.0 });
                }
                nodes.insert(a.clone());
                nodes.insert(b.clone());
                edges.push((a, b, cost));
            }
            ("node" | "start" | "terminal" | "edge", _) => {
                return Err(syntax(format!("wrong number of arguments to `{directive}`")));
            }
            _ => return Err(syntax(format!("unknown directive `{directive}`"))),
        }
    }

    let (start_line, start) = start.ok_or(GraphError::MissingDirective("start"))?;
    let (terminal_line, terminal) = terminal.ok_or(GraphError::MissingDirective("terminal"))?;
    for (line, n) in [(start_line, &start), (terminal_line, &terminal)] {
        if !nodes.contains(n) {
            return Err(GraphError::UnknownNode { line, name: n.0.clone() });
        }
    }
    if start == terminal {
        return Err(GraphError::StartIsTerminal(start.0));
    }
    Ok(WeightedMultiGraph::from_parts_unchecked(nodes, edges, &start, &terminal))
}

/// BFS hop level of every node, measured from the start node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelAssignment {
    /// Indexed by node index.
    levels: Vec<usize>,
    /// Level of the terminal node.
    depth: usize,
}

impl LevelAssignment {
    pub fn level(&self, node: usize) -> usize {
        self.levels[node]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub fn by_name<'g>(&self, g: &'g WeightedMultiGraph) -> BTreeMap<&'g NodeId, usize> {
        g.nodes().iter().zip(self.levels.iter().copied()).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("node `{0}` is unreachable from the start node")]
    UnreachableNode(NodeId),
}

pub fn compute_levels(g: &WeightedMultiGraph) -> Result<LevelAssignment, LevelError> {
    let levels = g
        .hop_distances(g.start())
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| LevelError::UnreachableNode(g.name(i).clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let depth = levels[g.terminal()];
    Ok(LevelAssignment { levels, depth })
}
