//! Hop-by-hop message simulator.
//!
//! A scheme's step function is an associated function with no `self`: the
//! only state it can reach is the [`LocalView`] the simulator hands it,
//! which holds the current vertex's table and label, the destination's
//! label and the message header. Every read through the view is logged and
//! audited against the vertex it belongs to.

mod eval;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Length, Port, Vertex, WeightedGraph};
use crate::hierarchy::Hierarchy;
use crate::tree_routing::TreeError;

pub use eval::{evaluate, storage_stats, EvalError, EvalOptions, EvalReport, PairResult, PairSet, StorageStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("vertex {vertex} has no record for tree {tree}")]
    MissingTreeRecord { vertex: Vertex, tree: Vertex },
    #[error("vertex {vertex} has no stored label for {target}")]
    MissingLabel { vertex: Vertex, target: Vertex },
    #[error("message arrived without a header")]
    MissingHeader,
    #[error("header path exhausted before delivery")]
    HeaderExhausted,
    #[error("distance hint required but not supplied")]
    MissingHint,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<H> {
    Forward { port: Port, header: H },
    Deliver,
}

/// Data a step function touched, tagged with the vertex it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Access {
    Table(Vertex),
    OwnLabel(Vertex),
    DestLabel(Vertex),
    DistanceHint,
}

/// Tree a route is currently using.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeRef {
    /// Cluster tree of a center.
    Cluster(Vertex),
    /// Ball tree rooted at a vertex.
    Ball(Vertex),
}

impl fmt::Display for TreeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeRef::Cluster(c) => write!(f, "cluster({c})"),
            TreeRef::Ball(r) => write!(f, "ball({r})"),
        }
    }
}

/// Per-hop routing decisions worth keeping in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Level { level: usize },
    Case { name: String },
    Tree { tree: TreeRef },
    DeltaInit { a: usize, value: i64 },
    DeltaUpdate { r: usize, j: usize, value: i64 },
    Detour { i: usize, pivot: Vertex },
    Hit { pivot: Vertex },
    Miss { pivot: Vertex },
    HeaderPath { ports: usize },
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Level { level } => write!(f, "level {level}"),
            Decision::Case { name } => write!(f, "case {name}"),
            Decision::Tree { tree } => write!(f, "tree {tree}"),
            Decision::DeltaInit { a, value } => write!(f, "delta_0 = {value} (a = {a})"),
            Decision::DeltaUpdate { r, j, value } => write!(f, "delta_{r} = {value} (j = {j})"),
            Decision::Detour { i, pivot } => write!(f, "detour {i} to pivot {pivot}"),
            Decision::Hit { pivot } => write!(f, "hit at {pivot}"),
            Decision::Miss { pivot } => write!(f, "miss at {pivot}"),
            Decision::HeaderPath { ports } => write!(f, "header path of {ports} ports"),
        }
    }
}

/// The only window a step function has onto the network.
pub struct LocalView<'a, T, L> {
    at: Vertex,
    dest: Vertex,
    table: &'a T,
    label: &'a L,
    dest_label: &'a L,
    hint: Option<Length>,
    accesses: Vec<Access>,
    decisions: Vec<Decision>,
}

impl<'a, T, L> LocalView<'a, T, L> {
    pub fn new(at: Vertex, table: &'a T, label: &'a L, dest: Vertex, dest_label: &'a L, hint: Option<Length>) -> Self {
        Self { at, dest, table, label, dest_label, hint, accesses: Vec::new(), decisions: Vec::new() }
    }

    pub fn table(&mut self) -> &'a T {
        self.accesses.push(Access::Table(self.at));
        self.table
    }

    pub fn label(&mut self) -> &'a L {
        self.accesses.push(Access::OwnLabel(self.at));
        self.label
    }

    pub fn dest_label(&mut self) -> &'a L {
        self.accesses.push(Access::DestLabel(self.dest));
        self.dest_label
    }

    /// Out-of-band `d(source, dest)`, only for schemes that declare it.
    pub fn hint(&mut self) -> Option<Length> {
        self.accesses.push(Access::DistanceHint);
        self.hint
    }

    pub fn log(&mut self, d: Decision) {
        self.decisions.push(d);
    }

    fn violations(&self, hint_allowed: bool) -> usize {
        self.accesses
            .iter()
            .filter(|a| match **a {
                Access::Table(o) | Access::OwnLabel(o) => o != self.at,
                Access::DestLabel(o) => o != self.dest,
                Access::DistanceHint => !hint_allowed,
            })
            .count()
    }
}

/// A preprocessed scheme the simulator can run.
pub trait RoutingScheme: Sync {
    type Table: Sync;
    type Label: Sync;
    type Header: Clone + Send;

    fn tag(&self) -> &'static str;
    fn graph(&self) -> &WeightedGraph;
    fn hierarchy(&self) -> &Hierarchy;
    fn table(&self, v: Vertex) -> &Self::Table;
    fn label(&self, v: Vertex) -> &Self::Label;

    /// One routing decision at the vertex owning `view`.
    fn step(
        view: &mut LocalView<'_, Self::Table, Self::Label>,
        header: Option<Self::Header>,
    ) -> Result<Step<Self::Header>, SchemeError>;

    fn header_words(header: &Self::Header) -> usize;
    fn table_entries(&self, v: Vertex) -> usize;
    fn table_words(&self, v: Vertex) -> usize;
    fn label_words(&self, v: Vertex) -> usize;

    /// Whether the source may read `d(source, dest)` from the view.
    fn uses_distance_hint(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEdge {
    pub from: Vertex,
    pub port: Port,
    pub to: Vertex,
    pub weight: Length,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteTrace {
    pub source: Vertex,
    pub dest: Vertex,
    pub edges: Vec<TraceEdge>,
    pub length: Length,
    pub decisions: Vec<(Vertex, Decision)>,
    pub max_header_words: usize,
    pub audit_violations: usize,
}

impl RouteTrace {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    /// Vertices visited, source first.
    pub fn vertices(&self) -> Vec<Vertex> {
        std::iter::once(self.source).chain(self.edges.iter().map(|e| e.to)).collect()
    }

    /// Line-oriented rendering for debugging.
    pub fn render(&self) -> String {
        let mut out = format!("route {} -> {}: length {}, {} hops\n", self.source, self.dest, self.length, self.hops());
        let mut d = self.decisions.iter().peekable();
        let mut emit = |out: &mut String, at: Vertex| {
            while let Some((_, dec)) = d.next_if(|(v, _)| *v == at) {
                out.push_str(&format!("  @{at}: {dec}\n"));
            }
        };
        emit(&mut out, self.source);
        for e in &self.edges {
            out.push_str(&format!("  {} -[port {}, w {}]-> {}\n", e.from, e.port, e.weight, e.to));
            emit(&mut out, e.to);
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("at vertex {at}: {source}")]
    Scheme { at: Vertex, source: SchemeError },
    #[error("hop budget of {budget} exceeded")]
    LoopBudgetExceeded { budget: usize },
    #[error("delivered at {at}, not at the destination")]
    WrongDelivery { at: Vertex },
    #[error("vertex {at} has no port {port}")]
    InvalidPort { at: Vertex, port: Port },
}

/// Default hop budget `8 · k · n`.
pub fn default_hop_budget<S: RoutingScheme>(scheme: &S) -> usize {
    8 * scheme.hierarchy().k * scheme.graph().n()
}

pub fn run_route<S: RoutingScheme>(
    scheme: &S,
    u: Vertex,
    v: Vertex,
    hop_budget: usize,
) -> Result<RouteTrace, RouteError> {
    run_route_with_hint(scheme, u, v, None, hop_budget)
}

/// Routes one message. `hint` is exposed to the step function at every hop
/// but only schemes declaring [`RoutingScheme::uses_distance_hint`] may read it.
pub fn run_route_with_hint<S: RoutingScheme>(
    scheme: &S,
    u: Vertex,
    v: Vertex,
    hint: Option<Length>,
    hop_budget: usize,
) -> Result<RouteTrace, RouteError> {
    let g = scheme.graph();
    let hint_allowed = scheme.uses_distance_hint();
    let mut trace = RouteTrace {
        source: u,
        dest: v,
        edges: Vec::new(),
        length: 0,
        decisions: Vec::new(),
        max_header_words: 0,
        audit_violations: 0,
    };
    let mut at = u;
    let mut header: Option<S::Header> = None;
    loop {
        let mut view = LocalView::new(at, scheme.table(at), scheme.label(at), v, scheme.label(v), hint);
        let step = S::step(&mut view, header.take());
        trace.audit_violations += view.violations(hint_allowed);
        trace.decisions.extend(view.decisions.into_iter().map(|d| (at, d)));
        match step.map_err(|source| RouteError::Scheme { at, source })? {
            Step::Deliver => {
                if at != v {
                    return Err(RouteError::WrongDelivery { at });
                }
                return Ok(trace);
            }
            Step::Forward { port, header: h } => {
                let arc = g.arc(at, port).ok_or(RouteError::InvalidPort { at, port })?;
                trace.max_header_words = trace.max_header_words.max(S::header_words(&h));
                trace.edges.push(TraceEdge { from: at, port, to: arc.to, weight: arc.weight });
                trace.length += arc.weight;
                at = arc.to;
                header = Some(h);
                if trace.edges.len() > hop_budget {
                    return Err(RouteError::LoopBudgetExceeded { budget: hop_budget });
                }
            }
        }
    }
}
