use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{default_hop_budget, run_route_with_hint, RouteError, RoutingScheme};
use crate::graph::{DistanceOracle, Length, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSet {
    /// Every unordered pair, routed both ways.
    All,
    /// `count` distinct unordered pairs drawn with `seed`, routed both ways.
    Sample { count: usize, seed: u64 },
}

impl FromStr for PairSet {
    type Err = String;

    /// `all` or `sample:<count>:<seed>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(PairSet::All);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["sample", count, seed] => Ok(PairSet::Sample {
                count: count.parse().map_err(|_| format!("bad sample count `{count}`"))?,
                seed: seed.parse().map_err(|_| format!("bad sample seed `{seed}`"))?,
            }),
            _ => Err(format!("expected `all` or `sample:<count>:<seed>`, found `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub pairs: PairSet,
    /// Dummy vertex and its edge weight for augmented inputs. Pairs touching
    /// the dummy or whose shortest path must cross it are skipped.
    pub dummy: Option<(Vertex, Length)>,
    /// Defaults to `8 · k · n`.
    pub hop_budget: Option<usize>,
}

impl EvalOptions {
    pub fn new(pairs: PairSet) -> Self {
        Self { pairs, dummy: None, hop_budget: None }
    }
}

/// Both directions between `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairResult {
    pub u: Vertex,
    pub v: Vertex,
    pub d_uv: Length,
    pub d_vu: Length,
    pub routed_uv: Length,
    pub routed_vu: Length,
}

impl PairResult {
    pub fn stretch_uv(&self) -> f64 {
        self.routed_uv as f64 / self.d_uv as f64
    }

    pub fn stretch_vu(&self) -> f64 {
        self.routed_vu as f64 / self.d_vu as f64
    }

    pub fn roundtrip_stretch(&self) -> f64 {
        (self.routed_uv + self.routed_vu) as f64 / (self.d_uv + self.d_vu) as f64
    }

    /// `routed(u↔v) ≤ factor · d(u↔v)` in exact arithmetic.
    pub fn roundtrip_within(&self, num: u64, den: u64) -> bool {
        let routed = (self.routed_uv + self.routed_vu) as u128 * den as u128;
        routed <= (self.d_uv + self.d_vu) as u128 * num as u128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageStats {
    pub total_entries: usize,
    pub max_entries: usize,
    pub avg_entries: f64,
    pub total_words: usize,
    pub max_words: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scheme: String,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub pairs: Vec<PairResult>,
    pub max_one_way_stretch: f64,
    pub avg_one_way_stretch: f64,
    pub max_roundtrip_stretch: f64,
    pub avg_roundtrip_stretch: f64,
    pub storage: StorageStats,
    pub max_label_words: usize,
    pub max_header_words: usize,
    pub max_hops: usize,
    pub audit_violations: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("routing {u} -> {v} failed: {source}")]
    Route { u: Vertex, v: Vertex, source: RouteError },
}

fn pair_list(n: usize, set: PairSet, skip: &dyn Fn(Vertex, Vertex) -> bool) -> Vec<(Vertex, Vertex)> {
    let all = || (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)));
    match set {
        PairSet::All => all().filter(|&(u, v)| !skip(u, v)).collect(),
        PairSet::Sample { count, seed } => {
            let eligible = all().filter(|&(u, v)| !skip(u, v)).count();
            let want = count.min(eligible);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen = BTreeSet::new();
            while chosen.len() < want {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !skip(u.min(v), u.max(v)) {
                    chosen.insert((u.min(v), u.max(v)));
                }
            }
            chosen.into_iter().collect()
        }
    }
}

/// Routes every selected pair in both directions and compares with the
/// oracle. Results are ordered by pair regardless of scheduling.
pub fn evaluate<S: RoutingScheme>(
    scheme: &S,
    oracle: &DistanceOracle,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let n = scheme.graph().n();
    let budget = opts.hop_budget.unwrap_or_else(|| default_hop_budget(scheme));
    let skip = |u: Vertex, v: Vertex| match opts.dummy {
        Some((dummy, w)) => u == dummy || v == dummy || oracle.d(u, v) >= w || oracle.d(v, u) >= w,
        None => false,
    };
    let pairs = pair_list(n, opts.pairs, &skip);
    let hinted = scheme.uses_distance_hint();

    let route = |s: Vertex, t: Vertex| {
        let hint = hinted.then(|| oracle.d(s, t));
        run_route_with_hint(scheme, s, t, hint, budget).map_err(|source| EvalError::Route { u: s, v: t, source })
    };
    let results: Vec<Result<(PairResult, usize, usize, usize), EvalError>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let a = route(u, v)?;
            let b = route(v, u)?;
            Ok((
                PairResult {
                    u,
                    v,
                    d_uv: oracle.d(u, v),
                    d_vu: oracle.d(v, u),
                    routed_uv: a.length,
                    routed_vu: b.length,
                },
                a.max_header_words.max(b.max_header_words),
                a.hops().max(b.hops()),
                a.audit_violations + b.audit_violations,
            ))
        })
        .collect();

    let mut report = EvalReport {
        scheme: scheme.tag().to_string(),
        k: scheme.hierarchy().k,
        n,
        seed: scheme.hierarchy().seed,
        pairs: Vec::with_capacity(results.len()),
        max_one_way_stretch: 1.0,
        avg_one_way_stretch: 1.0,
        max_roundtrip_stretch: 1.0,
        avg_roundtrip_stretch: 1.0,
        storage: storage_stats(scheme, opts.dummy.map(|d| d.0)),
        max_label_words: (0..n)
            .filter(|&v| Some(v) != opts.dummy.map(|d| d.0))
            .map(|v| scheme.label_words(v))
            .max()
            .unwrap_or(0),
        max_header_words: 0,
        max_hops: 0,
        audit_violations: 0,
    };
    let (mut one_sum, mut rt_sum) = (0.0, 0.0);
    for r in results {
        let (p, header, hops, violations) = r?;
        report.max_one_way_stretch = report.max_one_way_stretch.max(p.stretch_uv()).max(p.stretch_vu());
        report.max_roundtrip_stretch = report.max_roundtrip_stretch.max(p.roundtrip_stretch());
        one_sum += p.stretch_uv() + p.stretch_vu();
        rt_sum += p.roundtrip_stretch();
        report.max_header_words = report.max_header_words.max(header);
        report.max_hops = report.max_hops.max(hops);
        report.audit_violations += violations;
        report.pairs.push(p);
    }
    if !report.pairs.is_empty() {
        report.avg_one_way_stretch = one_sum / (2 * report.pairs.len()) as f64;
        report.avg_roundtrip_stretch = rt_sum / report.pairs.len() as f64;
    }
    Ok(report)
}

pub fn storage_stats<S: RoutingScheme>(scheme: &S, dummy: Option<Vertex>) -> StorageStats {
    let vs: Vec<Vertex> = (0..scheme.graph().n()).filter(|&v| Some(v) != dummy).collect();
    let entries: Vec<usize> = vs.iter().map(|&v| scheme.table_entries(v)).collect();
    let words: Vec<usize> = vs.iter().map(|&v| scheme.table_words(v)).collect();
    let total_entries: usize = entries.iter().sum();
    StorageStats {
        total_entries,
        max_entries: entries.iter().copied().max().unwrap_or(0),
        avg_entries: total_entries as f64 / vs.len().max(1) as f64,
        total_words: words.iter().sum(),
        max_words: words.iter().copied().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_set_parsing() {
        assert_eq!("all".parse::<PairSet>(), Ok(PairSet::All));
        assert_eq!("sample:10:3".parse::<PairSet>(), Ok(PairSet::Sample { count: 10, seed: 3 }));
        assert!("sample:x:3".parse::<PairSet>().is_err());
        assert!("some".parse::<PairSet>().is_err());
    }

    #[test]
    fn samples_are_distinct_and_capped() {
        let none = |_: Vertex, _: Vertex| false;
        let p = pair_list(5, PairSet::Sample { count: 100, seed: 1 }, &none);
        assert_eq!(p.len(), 10);
        let q = pair_list(50, PairSet::Sample { count: 30, seed: 1 }, &none);
        assert_eq!(q, pair_list(50, PairSet::Sample { count: 30, seed: 1 }, &none));
        assert!(q.iter().all(|&(u, v)| u < v));
    }

    #[test]
    fn exact_roundtrip_check() {
        let p = PairResult { u: 0, v: 1, d_uv: 2, d_vu: 3, routed_uv: 6, routed_vu: 9 };
        assert!(p.roundtrip_within(3, 1));
        assert!(!p.roundtrip_within(29, 10));
    }
}
