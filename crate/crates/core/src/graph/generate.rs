use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_connected, GraphError, Length, Vertex, WeightedGraph};

const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    ErdosRenyi,
    RandomGeometric,
    DirectedStronglyConnected,
}

impl FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "erdos-renyi" => Ok(Self::ErdosRenyi),
            "random-geometric" => Ok(Self::RandomGeometric),
            "directed-strongly-connected" | "directed" => Ok(Self::DirectedStronglyConnected),
            other => Err(format!("unknown graph kind `{other}`")),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ErdosRenyi => "erdos-renyi",
            Self::RandomGeometric => "random-geometric",
            Self::DirectedStronglyConnected => "directed-strongly-connected",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: GraphKind,
    pub n: usize,
    /// Edge probability (Erdős–Rényi, directed extra arcs) or connection
    /// radius in the unit square (random geometric).
    pub density: f64,
    pub min_weight: Length,
    pub max_weight: Length,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(kind: GraphKind, n: usize, density: f64, seed: u64) -> Self {
        Self { kind, n, density, min_weight: 1, max_weight: 100, seed }
    }

    pub fn weights(mut self, min_weight: Length, max_weight: Length) -> Self {
        self.min_weight = min_weight;
        self.max_weight = max_weight;
        self
    }
}

/// Generates a connected (undirected kinds) or strongly connected (directed
/// kind) graph in canonical port order. Deterministic for a fixed config.
pub fn generate(cfg: &GeneratorConfig) -> Result<WeightedGraph, GraphError> {
    let fail = |reason: &str| GraphError::GenerationFailed { attempts: 0, reason: reason.to_string() };
    if cfg.n < 2 {
        return Err(fail("need at least 2 vertices"));
    }
    if cfg.min_weight == 0 || cfg.min_weight > cfg.max_weight {
        return Err(fail("weight range must satisfy 1 <= wmin <= wmax"));
    }
    if cfg.density.is_nan() || cfg.density <= 0.0 {
        return Err(fail("density must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.kind {
        GraphKind::DirectedStronglyConnected => Ok(directed_strongly_connected(cfg, &mut rng)),
        kind => {
            for _ in 0..MAX_ATTEMPTS {
                let edges = match kind {
                    GraphKind::ErdosRenyi => erdos_renyi(cfg, &mut rng),
                    _ => random_geometric(cfg, &mut rng),
                };
                let g = WeightedGraph::canonical(cfg.n, false, &edges)?;
                if is_connected(&g) {
                    return Ok(g);
                }
            }
            Err(GraphError::GenerationFailed {
                attempts: MAX_ATTEMPTS,
                reason: format!("no connected {kind} sample at density {}", cfg.density),
            })
        }
    }
}

fn weight(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Length {
    rng.gen_range(cfg.min_weight..=cfg.max_weight)
}

fn erdos_renyi(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex, Length)> {
    let mut edges = Vec::new();
    for u in 0..cfg.n {
        for v in u + 1..cfg.n {
            if rng.gen_bool(cfg.density.min(1.0)) {
                edges.push((u, v, weight(cfg, rng)));
            }
        }
    }
    edges
}

/// Points in the unit square joined when closer than `density`; weights
/// scale linearly with Euclidean length inside the weight range.
fn random_geometric(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex, Length)> {
    let pts: Vec<(f64, f64)> = (0..cfg.n).map(|_| (rng.gen(), rng.gen())).collect();
    let span = (cfg.max_weight - cfg.min_weight) as f64;
    let mut edges = Vec::new();
    for u in 0..cfg.n {
        for v in u + 1..cfg.n {
            let d = ((pts[u].0 - pts[v].0).powi(2) + (pts[u].1 - pts[v].1).powi(2)).sqrt();
            if d <= cfg.density {
                let w = cfg.min_weight + (span * (d / cfg.density)).round() as Length;
                edges.push((u, v, w.min(cfg.max_weight)));
            }
        }
    }
    edges
}

/// A random Hamiltonian cycle plus independent extra arcs.
fn directed_strongly_connected(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let n = cfg.n;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut on_cycle = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for i in 0..n {
        let (u, v) = (order[i], order[(i + 1) % n]);
        on_cycle.insert((u, v));
        edges.push((u, v, weight(cfg, rng)));
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && !on_cycle.contains(&(u, v)) && rng.gen_bool(cfg.density.min(1.0)) {
                edges.push((u, v, weight(cfg, rng)));
            }
        }
    }
    WeightedGraph::canonical(n, true, &edges).expect("generated arcs are valid")
}
