use rayon::prelude::*;

use super::{dijkstra, Direction, GraphError, Length, Vertex, WeightedGraph, INFINITE};

/// Exact all-pairs distances, one forward Dijkstra per source.
#[derive(Debug, Clone)]
pub struct DistanceOracle {
    n: usize,
    dist: Vec<Length>,
}

impl DistanceOracle {
    pub fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let rows: Vec<Vec<Length>> = (0..n).into_par_iter().map(|s| dijkstra(g, s, Direction::Forward).dist).collect();
        Self { n, dist: rows.into_iter().flatten().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One-way distance `d(u, v)`; [`INFINITE`] if unreachable.
    pub fn d(&self, u: Vertex, v: Vertex) -> Length {
        self.dist[u * self.n + v]
    }

    /// Roundtrip distance `d(u, v) + d(v, u)`, saturating at [`INFINITE`].
    pub fn roundtrip(&self, u: Vertex, v: Vertex) -> Length {
        let (a, b) = (self.d(u, v), self.d(v, u));
        if a == INFINITE || b == INFINITE {
            INFINITE
        } else {
            a + b
        }
    }

    pub fn try_roundtrip(&self, u: Vertex, v: Vertex) -> Result<Length, GraphError> {
        match self.roundtrip(u, v) {
            INFINITE => Err(GraphError::UnreachablePair { u, v }),
            d => Ok(d),
        }
    }

    /// `d(u, X)` for a vertex set.
    pub fn d_to_set(&self, u: Vertex, set: &[Vertex]) -> Length {
        set.iter().map(|&x| self.d(u, x)).min().unwrap_or(INFINITE)
    }

    pub fn all_finite(&self) -> bool {
        self.dist.iter().all(|&d| d != INFINITE)
    }
}

/// Roundtrip distance computed with two Dijkstra runs.
pub fn roundtrip_distance(g: &WeightedGraph, u: Vertex, v: Vertex) -> Result<Length, GraphError> {
    let fwd = dijkstra(g, u, Direction::Forward).dist[v];
    let back = dijkstra(g, u, Direction::Reverse).dist[v];
    if fwd == INFINITE || back == INFINITE {
        return Err(GraphError::UnreachablePair { u, v });
    }
    Ok(fwd + back)
}
