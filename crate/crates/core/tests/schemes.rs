//! Stretch guarantees of every scheme against Floyd–Warshall distances.

mod common;

use common::{directed_corpus, floyd_warshall, undirected_corpus};
use compact_routing::graph::{generate, DistanceOracle, GeneratorConfig, GraphKind, WeightedGraph};
use compact_routing::hierarchy::{build_hierarchy, HierarchyConfig};
use compact_routing::scheme::{stretch_bound, SchemeKind, SchemeState, StateMeta};
use compact_routing::sim::{EvalOptions, EvalReport, PairSet};
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn run(kind: SchemeKind, g: &WeightedGraph, k: usize, seed: u64) -> (SchemeState, EvalReport) {
    let cfg = HierarchyConfig::new(k, seed).bound_first_clusters(kind == SchemeKind::Directed7);
    let h = build_hierarchy(g, cfg).unwrap();
    let s = SchemeState::preprocess(kind, g.clone(), h).unwrap();
    let report = s.evaluate(&DistanceOracle::new(g), &EvalOptions::new(PairSet::All)).unwrap();
    assert_eq!(report.audit_violations, 0);
    (s, report)
}

fn assert_roundtrip_bound(g: &WeightedGraph, report: &EvalReport, bound: u64) {
    let d = floyd_warshall(g);
    assert_eq!(report.pairs.len(), g.n() * (g.n() - 1) / 2);
    for p in &report.pairs {
        assert_eq!((p.d_uv, p.d_vu), (d[p.u][p.v], d[p.v][p.u]));
        assert!(p.routed_uv >= p.d_uv && p.routed_vu >= p.d_vu);
        let exact = d[p.u][p.v] + d[p.v][p.u];
        assert!(p.routed_uv + p.routed_vu <= bound * exact, "pair ({}, {})", p.u, p.v);
    }
}

#[test]
fn undirected_roundtrip_stretch() {
    for (seed, g) in undirected_corpus(4) {
        for k in [1, 2, 3] {
            let (_, report) = run(SchemeKind::UndirectedRt, &g, k, seed);
            assert_roundtrip_bound(&g, &report, 2 * k as u64 - 1);
        }
    }
}

#[test]
fn directed_seven_stretch() {
    for (seed, g) in directed_corpus(4) {
        let (_, report) = run(SchemeKind::Directed7, &g, 3, seed);
        assert_roundtrip_bound(&g, &report, 7);
    }
}

#[test]
fn directed_hop_stretch() {
    for (seed, g) in directed_corpus(4) {
        for k in [2, 3] {
            let (_, report) = run(SchemeKind::DirectedHop, &g, k, seed);
            assert_roundtrip_bound(&g, &report, 2 * k as u64 - 1);
        }
    }
}

#[test]
fn average_one_way_stretch() {
    for (seed, g) in undirected_corpus(3) {
        for k in [2, 3, 4] {
            let (_, report) = run(SchemeKind::Average, &g, k, seed);
            let bound = stretch_bound(k);
            let big = |x: u64| BigRational::from_integer(BigInt::from(x));
            for p in &report.pairs {
                assert!(big(p.routed_uv) <= &bound * big(p.d_uv));
                assert!(big(p.routed_vu) <= &bound * big(p.d_vu));
            }
        }
    }
}

#[test]
fn saved_state_routes_identically() {
    let (seed, g) = undirected_corpus(1).pop().unwrap();
    let (state, _) = run(SchemeKind::Average, &g, 3, seed);
    let meta = StateMeta { k: 3, seed, n: g.n(), budget: 3.0, dummy: None };
    let (m, again) = SchemeState::from_json(&state.to_json(&meta)).unwrap();
    assert_eq!(m, meta);
    for (u, v) in [(0, 7), (12, 3), (4, 4)] {
        assert_eq!(state.route(u, v).unwrap(), again.route(u, v).unwrap());
    }
}

#[test]
fn wrong_inputs_are_rejected() {
    let (seed, dg) = directed_corpus(1).pop().unwrap();
    let h = build_hierarchy(&dg, HierarchyConfig::new(3, seed)).unwrap();
    assert!(SchemeState::preprocess(SchemeKind::UndirectedRt, dg.clone(), h.clone()).is_err());
    assert!(SchemeState::preprocess(SchemeKind::Average, dg.clone(), h).is_err());
    let h2 = build_hierarchy(&dg, HierarchyConfig::new(2, seed)).unwrap();
    assert!(SchemeState::preprocess(SchemeKind::Directed7, dg, h2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_graphs_respect_bounds((n, seed, k) in (6usize..40, any::<u64>(), 1usize..4)) {
        let g = generate(&GeneratorConfig::new(GraphKind::ErdosRenyi, n, 0.2, seed).weights(1, 9)).unwrap();
        let k = k.min(compact_routing::hierarchy::max_k(n));
        let h = build_hierarchy(&g, HierarchyConfig::new(k, seed).budget(50.0)).unwrap();
        let s = SchemeState::preprocess(SchemeKind::UndirectedRt, g.clone(), h).unwrap();
        let d = floyd_warshall(&g);
        for u in 0..n {
            for v in 0..n {
                let a = s.route(u, v).unwrap();
                let b = s.route(v, u).unwrap();
                prop_assert_eq!(a.vertices().last().copied(), Some(v));
                prop_assert!(a.length + b.length <= (2 * k as u64 - 1) * (d[u][v] + d[v][u]));
                prop_assert_eq!(a.audit_violations, 0);
            }
        }
    }
}
