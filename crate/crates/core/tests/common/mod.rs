//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's distance or hierarchy code.

#![allow(dead_code)]

use compact_routing::graph::{generate, GeneratorConfig, GraphKind, Length, Vertex, WeightedGraph};

pub const INF: Length = Length::MAX;

/// All-pairs distances by Floyd–Warshall over the edge list.
pub fn floyd_warshall(g: &WeightedGraph) -> Vec<Vec<Length>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (a, b, w) in g.edges() {
        d[a][b] = d[a][b].min(w);
        if !g.is_directed() {
            d[b][a] = d[b][a].min(w);
        }
    }
    for m in 0..n {
        for i in 0..n {
            if d[i][m] == INF {
                continue;
            }
            for j in 0..n {
                if d[m][j] != INF && d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    d
}

/// Sets recomputed from a distance matrix for fixed sample levels.
pub struct BruteSets {
    pub d: Vec<Vec<Length>>,
    pub levels: Vec<Vec<Vertex>>,
    pub pivots: Vec<Vec<Vertex>>,
    pub bunches: Vec<Vec<Vec<Vertex>>>,
    pub clusters: Vec<Vec<Vertex>>,
}

impl BruteSets {
    pub fn rt(&self, a: Vertex, b: Vertex) -> Length {
        self.d[a][b] + self.d[b][a]
    }

    /// Position of `x` in the roundtrip order seen from `v`.
    pub fn key(&self, v: Vertex, x: Vertex) -> (Length, Length, Vertex) {
        (self.rt(v, x), self.d[x][v], x)
    }

    pub fn top(&self, v: Vertex) -> usize {
        (0..self.levels.len()).rev().find(|&i| self.levels[i].contains(&v)).unwrap()
    }

    /// `v ∈ C(w, A_j)`, with `A_k` empty.
    pub fn in_cluster_wrt(&self, w: Vertex, v: Vertex, j: usize) -> bool {
        j >= self.levels.len() || self.key(v, w) < self.key(v, self.pivots[v][j])
    }

    pub fn in_bunch(&self, u: Vertex, x: Vertex) -> bool {
        self.bunches[u].iter().any(|b| b.contains(&x))
    }

    pub fn compute(d: Vec<Vec<Length>>, levels: Vec<Vec<Vertex>>) -> Self {
        let n = d.len();
        let k = levels.len();
        let mut s = BruteSets { d, levels, pivots: Vec::new(), bunches: Vec::new(), clusters: Vec::new() };
        for u in 0..n {
            let mut ps = Vec::new();
            for level in &s.levels {
                let mut best = level[0];
                for &x in level {
                    if s.key(u, x) < s.key(u, best) {
                        best = x;
                    }
                }
                ps.push(best);
            }
            s.pivots.push(ps);
        }
        for u in 0..n {
            let mut per_level = Vec::new();
            for i in 0..k {
                let mut b = Vec::new();
                for &x in &s.levels[i] {
                    let next_ok = i + 1 == k || s.key(u, x) < s.key(u, s.pivots[u][i + 1]);
                    let exact_level = i + 1 == k || !s.levels[i + 1].contains(&x);
                    if next_ok && exact_level {
                        b.push(x);
                    }
                }
                per_level.push(b);
            }
            s.bunches.push(per_level);
        }
        for w in 0..n {
            let j = s.top(w);
            let c = (0..n).filter(|&v| j + 1 == k || s.key(v, w) < s.key(v, s.pivots[v][j + 1])).collect();
            s.clusters.push(c);
        }
        s
    }
}

pub fn ln_density(n: usize, factor: f64) -> f64 {
    (factor * (n as f64).ln() / n as f64).min(1.0)
}

/// Connected undirected graphs, `n` cycling through 50, 100, 200, weights 1..=100.
pub fn undirected_corpus(count: usize) -> Vec<(u64, WeightedGraph)> {
    (0..count as u64)
        .map(|i| {
            let n = [50, 100, 200][i as usize % 3];
            let seed = 1000 + i;
            let cfg = GeneratorConfig::new(GraphKind::ErdosRenyi, n, ln_density(n, 2.0), seed).weights(1, 100);
            (seed, generate(&cfg).expect("corpus graph"))
        })
        .collect()
}

/// Strongly connected digraphs, `n` cycling through 40, 80, 150.
pub fn directed_corpus(count: usize) -> Vec<(u64, WeightedGraph)> {
    (0..count as u64)
        .map(|i| {
            let n = [40, 80, 150][i as usize % 3];
            let seed = 2000 + i;
            let cfg =
                GeneratorConfig::new(GraphKind::DirectedStronglyConnected, n, 4.0 / n as f64, seed).weights(1, 100);
            (seed, generate(&cfg).expect("corpus graph"))
        })
        .collect()
}

/// Shortest path `from -> to` as a vertex list, recovered greedily from the
/// distance matrix (first neighbor in port order that stays on a shortest path).
pub fn matrix_path(g: &WeightedGraph, d: &[Vec<Length>], from: Vertex, to: Vertex) -> Vec<Vertex> {
    let mut path = vec![from];
    let mut at = from;
    while at != to {
        let next = g
            .arcs(at)
            .iter()
            .find(|a| d[a.to][to] != INF && a.weight + d[a.to][to] == d[at][to])
            .expect("shortest path continues");
        at = next.to;
        path.push(at);
    }
    path
}
