//! Weighted graphs in the fixed-port model, exact shortest paths and the
//! all-pairs distance oracle every scheme is checked against.

mod generate;
mod io;
mod oracle;
mod scc;
mod sssp;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate, GeneratorConfig, GraphKind};
pub use io::{read_graph, write_graph};
pub use oracle::{roundtrip_distance, DistanceOracle};
pub use scc::{is_connected, is_strongly_connected, strongly_connected_components};
pub use sssp::{dijkstra, Direction, SsspResult};

pub type Vertex = usize;
pub type Port = usize;
/// Edge weights and path lengths. Sums are exact.
pub type Length = u64;

/// Distance of an unreachable vertex. Never used in arithmetic.
pub const INFINITE: Length = Length::MAX;
/// Largest admissible edge weight.
pub const MAX_WEIGHT: Length = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge ({u}, {v}) has weight {weight}; weights must lie in 1..=2^32")]
    NonPositiveWeight { u: Vertex, v: Vertex, weight: Length },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: Vertex, v: Vertex },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertices {u} and {v} are not mutually reachable")]
    UnreachablePair { u: Vertex, v: Vertex },
    #[error("graph generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
}

/// One entry of an adjacency list. The port is the entry's index in the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub to: Vertex,
    pub weight: Length,
}

/// Reversed arc, stored at the head of the original arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReverseArc {
    pub from: Vertex,
    pub weight: Length,
    /// Port of the original arc at `from`.
    pub port: Port,
}

/// Directed or undirected graph with positive integer weights.
///
/// Ports at a vertex are the indices `0..deg(v)` of its adjacency list and
/// are never renumbered. Undirected edges appear in both endpoint lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedGraph {
    directed: bool,
    adjacency: Vec<Vec<Arc>>,
    #[serde(skip)]
    transposed: OnceLock<Vec<Vec<ReverseArc>>>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed && self.adjacency == other.adjacency
    }
}

impl Eq for WeightedGraph {}

impl WeightedGraph {
    /// Builds a graph from an edge list. Adjacency order, and therefore port
    /// numbering, follows the order of `edges`.
    pub fn from_edges(n: usize, directed: bool, edges: &[(Vertex, Vertex, Length)]) -> Result<Self, GraphError> {
        let mut adjacency: Vec<Vec<Arc>> = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v, weight) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if weight == 0 || weight > MAX_WEIGHT {
                return Err(GraphError::NonPositiveWeight { u, v, weight });
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u: key.0, v: key.1 });
            }
            adjacency[u].push(Arc { to: v, weight });
            if !directed {
                adjacency[v].push(Arc { to: u, weight });
            }
        }
        Ok(Self { directed, adjacency, transposed: OnceLock::new() })
    }

    /// Canonical form: edges sorted by `(u, v)`, undirected edges with `u < v`.
    pub fn canonical(n: usize, directed: bool, edges: &[(Vertex, Vertex, Length)]) -> Result<Self, GraphError> {
        let mut sorted: Vec<_> =
            edges.iter().map(|&(u, v, w)| if directed || u < v { (u, v, w) } else { (v, u, w) }).collect();
        sorted.sort_unstable();
        Self::from_edges(n, directed, &sorted)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of edges (undirected edges counted once).
    pub fn m(&self) -> usize {
        let arcs: usize = self.adjacency.iter().map(Vec::len).sum();
        if self.directed {
            arcs
        } else {
            arcs / 2
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn arcs(&self, v: Vertex) -> &[Arc] {
        &self.adjacency[v]
    }

    pub fn arc(&self, v: Vertex, port: Port) -> Option<Arc> {
        self.adjacency.get(v)?.get(port).copied()
    }

    /// Port at `from` of the arc `from -> to`, if present.
    pub fn port_to(&self, from: Vertex, to: Vertex) -> Option<Port> {
        self.adjacency[from].iter().position(|a| a.to == to)
    }

    pub fn weight(&self, from: Vertex, to: Vertex) -> Option<Length> {
        self.adjacency[from].iter().find(|a| a.to == to).map(|a| a.weight)
    }

    pub fn max_weight(&self) -> Length {
        self.adjacency.iter().flatten().map(|a| a.weight).max().unwrap_or(1)
    }

    /// Arcs entering each vertex, built once on first use.
    pub fn transposed(&self) -> &[Vec<ReverseArc>] {
        self.transposed.get_or_init(|| {
            let mut rev = vec![Vec::new(); self.n()];
            for (from, arcs) in self.adjacency.iter().enumerate() {
                for (port, a) in arcs.iter().enumerate() {
                    rev[a.to].push(ReverseArc { from, weight: a.weight, port });
                }
            }
            rev
        })
    }

    /// Edge list in canonical order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex, Length)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, arcs) in self.adjacency.iter().enumerate() {
            for a in arcs {
                if self.directed || u < a.to {
                    out.push((u, a.to, a.weight));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Adds a dummy vertex joined in both directions to every vertex with
    /// weight `max_weight * n + 1`, making any input (strongly) connected.
    /// Returns the augmented graph and the dummy's id.
    pub fn augment(&self) -> (WeightedGraph, Vertex) {
        let n = self.n();
        let big = self.max_weight().saturating_mul(n as Length).saturating_add(1).min(MAX_WEIGHT);
        let mut edges = self.edges();
        for v in 0..n {
            edges.push((v, n, big));
            if self.directed {
                edges.push((n, v, big));
            }
        }
        let g = WeightedGraph::canonical(n + 1, self.directed, &edges)
            .expect("augmenting a valid graph yields a valid graph");
        (g, n)
    }
}
