//! Sampled level sets `A_0 ⊇ A_1 ⊇ … ⊇ A_k = ∅` with per-vertex pivots,
//! bunches and clusters.
//!
//! Every set is defined through one strict total order per vertex `v`:
//! `x ≺_v y` compares `(d(v↔x), d(x→v), x)` lexicographically. Pivots are
//! order minima, bunches and clusters are order comparisons against the next
//! pivot. With integer weights ties in roundtrip distance are common, and the
//! order keeps `p_i(u) ∈ B(u)` and makes bunch/cluster duality exact.

mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DistanceOracle, Length, Vertex, WeightedGraph, INFINITE};

pub use tree::{extract_double_tree, extract_tree, Orientation, RootedTree};

/// Retries with `seed + 1, seed + 2, …` before giving up.
pub const MAX_RETRIES: u64 = 64;

#[derive(Debug, Error, PartialEq)]
pub enum HierarchyError {
    #[error("k = {k} is outside 1..={max} for n = {n}")]
    InvalidK { k: usize, n: usize, max: usize },
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("bunch budget exceeded after {attempts} seeds (largest bunch {largest}, limit {limit:.1})")]
    BudgetExceeded { attempts: u64, largest: usize, limit: f64 },
    #[error("member {0} is unreachable from the tree root")]
    MemberUnreachable(Vertex),
}

/// Construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub k: usize,
    pub seed: u64,
    /// Constant `c` in the bunch-size limit `c · k · n^{1/k} · ln(n+1)`.
    pub budget: f64,
    /// Also bound `|C(w, A_1)|` for `w ∉ A_1` by `c · n^{1/k} · ln(n+1)`.
    pub bound_first_clusters: bool,
}

impl HierarchyConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, budget: 3.0, bound_first_clusters: false }
    }

    pub fn budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    pub fn bound_first_clusters(mut self, on: bool) -> Self {
        self.bound_first_clusters = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub k: usize,
    pub n: usize,
    /// Seed of the accepted sample.
    pub seed: u64,
    pub budget: f64,
    /// `levels[i]` = `A_i` sorted, for `i < k`. `A_k` is empty.
    pub levels: Vec<Vec<Vertex>>,
    /// Largest `i` with `v ∈ A_i`.
    pub top_level: Vec<usize>,
    /// `pivots[u][i]` = `p_i(u)` for `i < k`.
    pub pivots: Vec<Vec<Vertex>>,
    /// `h[u][i]` = `d(u, A_i)` for `i ≤ k`, with `h[u][k]` infinite.
    pub h: Vec<Vec<Length>>,
    /// `pivot_roundtrip[u][i]` = `d(u ↔ p_i(u))`.
    pub pivot_roundtrip: Vec<Vec<Length>>,
    /// `bunches[u][i]` = `B_i(u)` sorted.
    pub bunches: Vec<Vec<Vec<Vertex>>>,
    /// `clusters[w]` = `C(w) = C(w, A_{top+1})` sorted.
    pub clusters: Vec<Vec<Vertex>>,
}

/// Pivots, `h`, pivot roundtrips and bunches of one vertex.
type VertexSets = (Vec<Vertex>, Vec<Length>, Vec<Length>, Vec<Vec<Vertex>>);

/// Sort key of `x` in the order `≺_v`.
pub fn order_key(oracle: &DistanceOracle, v: Vertex, x: Vertex) -> (Length, Length, Vertex) {
    (oracle.roundtrip(v, x), oracle.d(x, v), x)
}

/// `a ≺_v b`.
pub fn precedes(oracle: &DistanceOracle, v: Vertex, a: Vertex, b: Vertex) -> bool {
    order_key(oracle, v, a) < order_key(oracle, v, b)
}

/// Largest admissible `k` for `n` vertices: `⌊log2 n⌋ + 1`.
pub fn max_k(n: usize) -> usize {
    (usize::BITS - n.max(1).leading_zeros()) as usize
}

/// Bunch-size limit `c · k · n^{1/k} · ln(n+1)`.
pub fn bunch_limit(n: usize, k: usize, budget: f64) -> f64 {
    budget * k as f64 * (n as f64).powf(1.0 / k as f64) * ((n + 1) as f64).ln()
}

/// Builds a hierarchy, computing all-pairs distances first.
pub fn build_hierarchy(g: &WeightedGraph, cfg: HierarchyConfig) -> Result<Hierarchy, HierarchyError> {
    let oracle = DistanceOracle::new(g);
    build_with_oracle(&oracle, cfg)
}

/// Builds a hierarchy over precomputed distances. Retries with the next
/// seed when `A_{k-1}` comes out empty or the size budget is exceeded.
pub fn build_with_oracle(oracle: &DistanceOracle, cfg: HierarchyConfig) -> Result<Hierarchy, HierarchyError> {
    let n = oracle.n();
    let k = cfg.k;
    if k == 0 || k > max_k(n) {
        return Err(HierarchyError::InvalidK { k, n, max: max_k(n) });
    }
    if !oracle.all_finite() {
        return Err(HierarchyError::NotStronglyConnected);
    }
    let limit = bunch_limit(n, k, cfg.budget);
    let cluster_limit = cfg.budget * (n as f64).powf(1.0 / k as f64) * ((n + 1) as f64).ln();
    let mut largest = 0;
    for attempt in 0..MAX_RETRIES {
        let seed = cfg.seed.wrapping_add(attempt);
        let levels = sample_levels(n, k, seed);
        if levels[k - 1].is_empty() {
            continue;
        }
        let h = assemble(oracle, k, seed, cfg.budget, levels);
        largest = h.bunches.iter().map(|b| b.iter().map(Vec::len).sum::<usize>()).max().unwrap_or(0);
        let clusters_ok = !cfg.bound_first_clusters
            || (0..n).filter(|&w| h.top_level[w] == 0).all(|w| h.clusters[w].len() as f64 <= cluster_limit);
        if largest as f64 <= limit && clusters_ok {
            return Ok(h);
        }
    }
    Err(HierarchyError::BudgetExceeded { attempts: MAX_RETRIES, largest, limit })
}

fn sample_levels(n: usize, k: usize, seed: u64) -> Vec<Vec<Vertex>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (n as f64).powf(-1.0 / k as f64);
    let mut levels = vec![(0..n).collect::<Vec<_>>()];
    for _ in 1..k {
        let next: Vec<Vertex> = levels.last().unwrap().iter().copied().filter(|_| rng.gen_bool(p)).collect();
        levels.push(next);
    }
    levels
}

/// Pivots, bunches and clusters for fixed levels.
pub fn assemble(oracle: &DistanceOracle, k: usize, seed: u64, budget: f64, levels: Vec<Vec<Vertex>>) -> Hierarchy {
    let n = oracle.n();
    let mut top_level = vec![0; n];
    for (i, level) in levels.iter().enumerate() {
        for &v in level {
            top_level[v] = i;
        }
    }

    let per_vertex: Vec<VertexSets> = (0..n)
        .into_par_iter()
        .map(|u| {
            let pivots: Vec<Vertex> = levels
                .iter()
                .map(|a| *a.iter().min_by_key(|&&x| order_key(oracle, u, x)).expect("nonempty level"))
                .collect();
            let mut h: Vec<Length> = levels.iter().map(|a| oracle.d_to_set(u, a)).collect();
            h.push(INFINITE);
            let rt = pivots.iter().map(|&p| oracle.roundtrip(u, p)).collect();
            let bunches = (0..k)
                .map(|i| {
                    if i + 1 == k {
                        return levels[i].clone();
                    }
                    let bound = order_key(oracle, u, pivots[i + 1]);
                    levels[i].iter().copied().filter(|&x| order_key(oracle, u, x) < bound).collect()
                })
                .collect();
            (pivots, h, rt, bunches)
        })
        .collect();

    let mut pivots = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    let mut pivot_roundtrip = Vec::with_capacity(n);
    let mut bunches = Vec::with_capacity(n);
    for (p, hh, rt, b) in per_vertex {
        pivots.push(p);
        h.push(hh);
        pivot_roundtrip.push(rt);
        bunches.push(b);
    }

    let clusters = (0..n)
        .into_par_iter()
        .map(|w| {
            let j = top_level[w];
            if j + 1 == k {
                return (0..n).collect();
            }
            (0..n).filter(|&v| order_key(oracle, v, w) < order_key(oracle, v, pivots[v][j + 1])).collect()
        })
        .collect();

    Hierarchy { k, n, seed, budget, levels, top_level, pivots, h, pivot_roundtrip, bunches, clusters }
}

impl Hierarchy {
    pub fn in_level(&self, v: Vertex, i: usize) -> bool {
        i < self.k && self.top_level[v] >= i
    }

    /// `B(u)` as a sorted list.
    pub fn bunch(&self, u: Vertex) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.bunches[u].iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn bunch_size(&self, u: Vertex) -> usize {
        self.bunches[u].iter().map(Vec::len).sum()
    }

    pub fn in_bunch_level(&self, u: Vertex, i: usize, x: Vertex) -> bool {
        self.bunches[u][i].binary_search(&x).is_ok()
    }

    pub fn in_bunch(&self, u: Vertex, x: Vertex) -> bool {
        self.bunches[u].iter().any(|b| b.binary_search(&x).is_ok())
    }

    pub fn in_cluster(&self, w: Vertex, v: Vertex) -> bool {
        self.clusters[w].binary_search(&v).is_ok()
    }

    pub fn total_bunch_size(&self) -> usize {
        (0..self.n).map(|u| self.bunch_size(u)).sum()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// `C(w, A_j) = {v : w ≺_v p_j(v)}` for any `w` and `1 ≤ j ≤ k`
    /// (`A_k = ∅` gives `V`).
    pub fn cluster_wrt(&self, oracle: &DistanceOracle, w: Vertex, j: usize) -> Vec<Vertex> {
        if j >= self.k {
            return (0..self.n).collect();
        }
        (0..self.n).filter(|&v| precedes(oracle, v, w, self.pivots[v][j])).collect()
    }
}
