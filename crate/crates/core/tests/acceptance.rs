//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num::{BigInt, BigRational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{directed_corpus, floyd_warshall, matrix_path, undirected_corpus, BruteSets};
use compact_routing::analysis::{bound_rows, storage_report, StorageSample};
use compact_routing::graph::{
    dijkstra, generate, Direction, DistanceOracle, GeneratorConfig, GraphKind, Length, Vertex, WeightedGraph,
};
use compact_routing::hierarchy::{build_hierarchy, Hierarchy, HierarchyConfig, RootedTree};
use compact_routing::scheme::{
    c_sequence, stretch_bound, AverageOracleScheme, AverageScheme, Directed7Scheme, DirectedHopScheme,
    UndirectedRtScheme,
};
use compact_routing::sim::{
    evaluate, run_route, run_route_with_hint, storage_stats, Decision, EvalOptions, PairSet, RoutingScheme,
};
use compact_routing::tree_routing::{next_port, Hop, TreeScheme};

/// Reference values of the bounds table: `(k, stretch, stretch / k)`.
const EXPECTED_BOUNDS: [(usize, f64, f64); 6] =
    [(4, 9.0, 2.250), (6, 14.3, 2.389), (8, 19.6, 2.455), (10, 24.9, 2.493), (20, 51.3, 2.567), (100, 262.4, 2.624)];
const STRETCH_TOL: f64 = 0.05;
const RATIO_TOL: f64 = 0.001;
const BOUNDS_SECONDS: f64 = 1.0;
const CORPUS_SIZE: usize = 20;
const TREE_COUNT: usize = 100;
const TREE_MAX_N: usize = 500;
const TREE_PAIRS: usize = 10_000;
const STORAGE_SIZES: [usize; 4] = [64, 128, 256, 512];
const STORAGE_SEEDS: u64 = 5;
const EXPONENT_BAND: (f64, f64) = (0.3, 0.7);
const SET_SUITE_MAX_N: usize = 30;

static AUDIT: AtomicUsize = AtomicUsize::new(0);
static AUDITED_ROUTES: AtomicUsize = AtomicUsize::new(0);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn record_audit(violations: usize, routes: usize) {
    AUDIT.fetch_add(violations, Ordering::Relaxed);
    AUDITED_ROUTES.fetch_add(routes, Ordering::Relaxed);
}

fn hierarchy(g: &WeightedGraph, k: usize, seed: u64) -> Hierarchy {
    build_hierarchy(g, HierarchyConfig::new(k, seed)).expect("hierarchy")
}

fn rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn bounds_table() -> Outcome {
    let start = Instant::now();
    let ks: Vec<usize> = EXPECTED_BOUNDS.iter().map(|r| r.0).collect();
    let rows = bound_rows(&ks);
    let elapsed = start.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    for (row, &(k, stretch, ratio)) in rows.iter().zip(&EXPECTED_BOUNDS) {
        if (row.stretch - stretch).abs() > STRETCH_TOL || (row.ratio() - ratio).abs() > RATIO_TOL {
            bad.push(format!("k={k}: got {:.3}/{:.4}", row.stretch, row.ratio()));
        }
    }
    let pass = bad.is_empty() && elapsed < BOUNDS_SECONDS;
    outcome(pass, format!("{} rows, {:.3}s {}", rows.len(), elapsed, bad.join("; ")))
}

fn undirected_roundtrip() -> Outcome {
    let corpus = undirected_corpus(CORPUS_SIZE);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for (seed, g) in &corpus {
        let fw = floyd_warshall(g);
        for k in [2usize, 3, 4] {
            let s = UndirectedRtScheme::preprocess(g.clone(), hierarchy(g, k, *seed)).expect("preprocess");
            let oracle = DistanceOracle::new(g);
            let report = evaluate(&s, &oracle, &EvalOptions::new(PairSet::All)).expect("evaluate");
            record_audit(report.audit_violations, 2 * report.pairs.len());
            let bound = (2 * k - 1) as u128;
            for p in &report.pairs {
                checked += 1;
                let exact = (fw[p.u][p.v] + fw[p.v][p.u]) as u128;
                if ((p.routed_uv + p.routed_vu) as u128) > bound * exact {
                    failures.push(format!("seed {seed} k={k} ({},{})", p.u, p.v));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} unordered pairs, {} violations {}", failures.len(), first(&failures)),
    )
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("(first: {s})")).unwrap_or_default()
}

fn directed_seven() -> Outcome {
    let corpus = directed_corpus(CORPUS_SIZE);
    let mut checked = 0usize;
    let mut exact_checked = 0usize;
    let mut failures = Vec::new();
    for (seed, g) in &corpus {
        let h = build_hierarchy(g, HierarchyConfig::new(3, *seed).bound_first_clusters(true)).expect("hierarchy");
        let fw = floyd_warshall(g);
        let brute = BruteSets::compute(fw.clone(), h.levels.clone());
        let s = Directed7Scheme::preprocess(g.clone(), h).expect("preprocess");
        let oracle = DistanceOracle::new(g);
        let report = evaluate(&s, &oracle, &EvalOptions::new(PairSet::All)).expect("evaluate");
        record_audit(report.audit_violations, 2 * report.pairs.len());
        for p in &report.pairs {
            checked += 1;
            let exact = fw[p.u][p.v] + fw[p.v][p.u];
            let routed = p.routed_uv + p.routed_vu;
            if routed as u128 > 7 * exact as u128 {
                failures.push(format!("seed {seed} ({},{}) stretch", p.u, p.v));
            }
            for (a, b) in [(p.u, p.v), (p.v, p.u)] {
                let in_ball = brute.bunches[a][0].contains(&b);
                let in_cluster = brute.key(b, a) < brute.key(b, brute.pivots[b][1]);
                if in_ball || in_cluster {
                    exact_checked += 1;
                    if routed != exact {
                        failures.push(format!("seed {seed} ({a},{b}) not exact"));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} pairs, {exact_checked} exactness checks, {} violations {}",
            failures.len(),
            first(&failures)
        ),
    )
}

fn directed_hop() -> Outcome {
    let corpus = directed_corpus(CORPUS_SIZE);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for (seed, g) in &corpus {
        let fw = floyd_warshall(g);
        for k in [2usize, 3] {
            let s = DirectedHopScheme::preprocess(g.clone(), hierarchy(g, k, *seed)).expect("preprocess");
            let oracle = DistanceOracle::new(g);
            let report = evaluate(&s, &oracle, &EvalOptions::new(PairSet::All)).expect("evaluate");
            record_audit(report.audit_violations, 2 * report.pairs.len());
            if report.max_header_words.saturating_sub(1) > 2 * s.hop_diameter {
                failures
                    .push(format!("seed {seed} k={k}: header {} vs D_hop {}", report.max_header_words, s.hop_diameter));
            }
            let bound = (2 * k - 1) as u128;
            for p in &report.pairs {
                checked += 1;
                let exact = (fw[p.u][p.v] + fw[p.v][p.u]) as u128;
                if ((p.routed_uv + p.routed_vu) as u128) > bound * exact {
                    failures.push(format!("seed {seed} k={k} ({},{})", p.u, p.v));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} pairs, {} violations {}", failures.len(), first(&failures)))
}

#[derive(Default)]
struct AverageTally {
    routes: usize,
    stretch_failures: Vec<String>,
    oracle_failures: Vec<String>,
    estimates: usize,
    updates: usize,
    delta_failures: Vec<String>,
}

fn average_runs() -> AverageTally {
    let corpus = undirected_corpus(CORPUS_SIZE);
    let mut tally = AverageTally::default();
    for (seed, g) in &corpus {
        let fw = floyd_warshall(g);
        let n = g.n();
        for k in [3usize, 4, 5, 6] {
            let s = AverageScheme::preprocess(g.clone(), hierarchy(g, k, *seed)).expect("preprocess");
            let oracle_scheme = AverageOracleScheme::new(&s);
            let bound = stretch_bound(k);
            let budget = 8 * k * n;
            let per_source: Vec<AverageTally> = (0..n)
                .into_par_iter()
                .map(|u| {
                    let mut t = AverageTally::default();
                    let mut violations = 0;
                    for v in 0..n {
                        let d = fw[u][v];
                        let tr = run_route(&s, u, v, budget).expect("average route");
                        violations += tr.audit_violations;
                        t.routes += 1;
                        if rat(tr.length as i128) > &bound * rat(d as i128) {
                            t.stretch_failures.push(format!("seed {seed} k={k} {u}->{v}: {} vs {d}", tr.length));
                        }
                        check_estimates(&tr.decisions, d, &mut t, || format!("seed {seed} k={k} {u}->{v}"));
                        let to = run_route_with_hint(&oracle_scheme, u, v, Some(d), budget).expect("oracle route");
                        violations += to.audit_violations;
                        if to.length as u128 > (2 * k - 1) as u128 * d as u128 {
                            t.oracle_failures.push(format!("seed {seed} k={k} {u}->{v}"));
                        }
                    }
                    record_audit(violations, 2 * n);
                    t
                })
                .collect();
            for t in per_source {
                tally.routes += t.routes;
                tally.estimates += t.estimates;
                tally.updates += t.updates;
                tally.stretch_failures.extend(t.stretch_failures);
                tally.oracle_failures.extend(t.oracle_failures);
                tally.delta_failures.extend(t.delta_failures);
            }
        }
    }
    tally
}

fn check_estimates(decisions: &[(Vertex, Decision)], d: Length, t: &mut AverageTally, what: impl Fn() -> String) {
    let mut seq: Option<Vec<BigRational>> = None;
    let mut prev: Option<i64> = None;
    for (_, dec) in decisions {
        match *dec {
            Decision::DeltaInit { a, value } => {
                seq = Some(c_sequence(a));
                prev = Some(value);
                t.estimates += 1;
                if value > d as i64 {
                    t.delta_failures.push(format!("{}: initial {value} > {d}", what()));
                }
            }
            Decision::DeltaUpdate { j, value, .. } => {
                t.estimates += 1;
                t.updates += 1;
                if value > d as i64 {
                    t.delta_failures.push(format!("{}: estimate {value} > {d}", what()));
                }
                match (&seq, prev) {
                    (Some(c), Some(p)) if rat(value as i128) >= &c[j] * rat(p as i128) => {}
                    _ => t.delta_failures.push(format!("{}: growth at j={j}", what())),
                }
                prev = Some(value);
            }
            _ => {}
        }
    }
}

fn set_property_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut instances = 0;
    for idx in 0..24u64 {
        let directed = idx % 2 == 1;
        let n = 12 + (idx as usize * 7) % (SET_SUITE_MAX_N - 11);
        let k = 2 + (idx as usize / 2) % 3;
        let seed = 3000 + idx;
        let cfg = if directed {
            GeneratorConfig::new(GraphKind::DirectedStronglyConnected, n, 3.0 / n as f64, seed)
        } else {
            GeneratorConfig::new(GraphKind::ErdosRenyi, n, common::ln_density(n, 2.0), seed)
        }
        .weights(1, 10);
        let g = generate(&cfg).expect("graph");
        let h = hierarchy(&g, k, seed);
        let b = BruteSets::compute(floyd_warshall(&g), h.levels.clone());
        instances += 1;
        let tag = |what: &str| format!("instance {idx} (n={n}, k={k}): {what}");

        // sets match brute force
        if b.pivots != h.pivots || b.bunches != h.bunches || b.clusters != h.clusters {
            failures.push(tag("sets differ from brute force"));
        }
        // duality
        for u in 0..n {
            for w in 0..n {
                if b.in_bunch(u, w) != b.clusters[w].contains(&u) {
                    failures.push(tag(&format!("duality at ({u},{w})")));
                }
            }
        }
        // ball prefix closure, strict roundtrip balls around every level
        for level in h.levels.iter().skip(1) {
            for u in 0..n {
                let radius = level.iter().map(|&x| b.rt(u, x)).min().unwrap();
                for v in (0..n).filter(|&v| b.rt(u, v) < radius) {
                    let out = matrix_path(&g, &b.d, u, v);
                    let inn = matrix_path(&g, &b.d, v, u);
                    if out.iter().chain(&inn).any(|&w| b.rt(u, w) >= radius) {
                        failures.push(tag(&format!("ball of {u} not closed at {v}")));
                    }
                }
            }
        }
        let in_b = |x: Vertex, y: Vertex| b.in_bunch(x, y);
        for u in 0..n {
            for v in 0..n {
                let d = b.rt(u, v);
                // pivot growth
                for i in 1..k {
                    let hyp = (0..i).all(|j| !in_b(v, b.pivots[u][j]) && !in_b(u, b.pivots[v][j]));
                    if hyp && (b.rt(u, b.pivots[u][i]) > i as Length * d || b.rt(v, b.pivots[v][i]) > i as Length * d) {
                        failures.push(tag(&format!("pivot growth at ({u},{v}), i={i}")));
                    }
                }
                // increment bound
                for i in 1..k {
                    if !in_b(u, b.pivots[v][i - 1]) && b.rt(v, b.pivots[v][i]) > b.rt(v, b.pivots[v][i - 1]) + 2 * d {
                        failures.push(tag(&format!("increment at ({u},{v}), i={i}")));
                    }
                }
            }
        }
        // undirected: clusters are closed along center-to-member paths
        if !directed {
            for w in 0..n {
                for &v in &b.clusters[w] {
                    if let Some(x) = matrix_path(&g, &b.d, w, v).iter().find(|&&x| !b.clusters[w].contains(&x)) {
                        failures.push(tag(&format!("cluster of {w} broken at {x} on the way to {v}")));
                    }
                }
            }
        }
        // both kinds: v ∈ C(u, A_j) and x on the path u -> v give v ∈ C(x, A_j)
        for u in 0..n {
            let j = b.top(u) + 1;
            for v in (0..n).filter(|&v| b.in_cluster_wrt(u, v, j)) {
                if let Some(x) = matrix_path(&g, &b.d, u, v).iter().find(|&&x| !b.in_cluster_wrt(x, v, j)) {
                    failures.push(tag(&format!("{v} in C({u}, A_{j}) but not in C({x}, A_{j})")));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{instances} instances, {} violations {}", failures.len(), first(&failures)))
}

/// Random tree with shuffled port order; deep or bushy depending on `shape`.
fn random_tree(rng: &mut ChaCha8Rng, n: usize, shape: usize) -> WeightedGraph {
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let lo = match shape {
            0 => 0,
            1 => i.saturating_sub(3),
            _ => i / 2,
        };
        let parent = rng.gen_range(lo..i);
        edges.push((perm[i], perm[parent], rng.gen_range(1..=100)));
    }
    edges.shuffle(rng);
    WeightedGraph::from_edges(n, false, &edges).expect("tree")
}

fn tree_routing() -> Outcome {
    let results: Vec<Result<(usize, usize), String>> = (0..TREE_COUNT as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(4000 + t);
            let n = rng.gen_range(2..=TREE_MAX_N);
            let g = random_tree(&mut rng, n, t as usize % 3);
            let root = rng.gen_range(0..n);
            let sssp = dijkstra(&g, root, Direction::Forward);
            let tree = RootedTree::from_sssp(&sssp, 0..n).map_err(|e| e.to_string())?;
            let scheme = TreeScheme::build(&g, &tree).map_err(|e| e.to_string())?;

            // brute force: parent and depth by explicit traversal
            let mut parent = vec![usize::MAX; n];
            let mut depth = vec![0usize; n];
            let mut stack = vec![root];
            let mut seen = vec![false; n];
            seen[root] = true;
            while let Some(x) = stack.pop() {
                for a in g.arcs(x) {
                    if !seen[a.to] {
                        seen[a.to] = true;
                        parent[a.to] = x;
                        depth[a.to] = depth[x] + 1;
                        stack.push(a.to);
                    }
                }
            }
            let tree_path = |mut a: Vertex, mut b: Vertex| {
                let (mut up, mut down) = (vec![a], vec![b]);
                while a != b {
                    if depth[a] >= depth[b] {
                        a = parent[a];
                        up.push(a);
                    } else {
                        b = parent[b];
                        down.push(b);
                    }
                }
                down.pop();
                up.extend(down.into_iter().rev());
                up
            };

            let light_limit = (n as f64).log2().floor() as usize + 1;
            let max_light = scheme.max_light_edges();
            if max_light > light_limit {
                return Err(format!("tree {t}: {max_light} light edges > {light_limit}"));
            }
            for _ in 0..TREE_PAIRS {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let label = scheme.label(v).unwrap();
                let mut walk = vec![u];
                let mut at = u;
                loop {
                    match next_port(scheme.record(at).unwrap(), label).map_err(|e| e.to_string())? {
                        Hop::Deliver => break,
                        Hop::Port(p) => {
                            at = g.arc(at, p).unwrap().to;
                            walk.push(at);
                            if walk.len() > n {
                                return Err(format!("tree {t}: loop routing {u}->{v}"));
                            }
                        }
                    }
                }
                if walk != tree_path(u, v) {
                    return Err(format!("tree {t}: wrong path {u}->{v}"));
                }
            }
            Ok((n, max_light))
        })
        .collect();
    let errors: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
    let worst = results.iter().filter_map(|r| r.as_ref().ok()).map(|&(_, l)| l).max().unwrap_or(0);
    outcome(
        errors.is_empty(),
        format!("{TREE_COUNT} trees x {TREE_PAIRS} pairs, max light list {worst} {}", first(&errors)),
    )
}

fn storage_scaling() -> Outcome {
    let mut samples = Vec::new();
    let mut duality_failures = Vec::new();
    for &n in &STORAGE_SIZES {
        for s in 0..STORAGE_SEEDS {
            let seed = 5000 + 10 * n as u64 + s;
            let cfg = GeneratorConfig::new(GraphKind::ErdosRenyi, n, common::ln_density(n, 2.0), seed);
            let g = generate(&cfg).expect("graph");
            let h = hierarchy(&g, 2, seed);
            let total_bunch = h.total_bunch_size();
            let rt = UndirectedRtScheme::preprocess(g.clone(), h.clone()).expect("preprocess");
            let st = storage_stats(&rt, None);
            samples.push(StorageSample {
                scheme: rt.tag().into(),
                k: 2,
                n,
                seed,
                avg_entries: st.avg_entries,
                max_entries: st.max_entries,
                total_entries: st.total_entries,
            });
            let avg = AverageScheme::preprocess(g, h).expect("preprocess");
            let total: usize = (0..n).map(|v| avg.table_entries(v)).sum();
            if total != 2 * total_bunch {
                duality_failures.push(format!("n={n} seed={seed}: {total} != 2*{total_bunch}"));
            }
        }
    }
    let report = storage_report(&samples);
    let fit = report.fits.iter().find(|f| f.1 == 2).and_then(|f| f.2.clone().ok());
    match fit {
        Some(f) => {
            let in_band = f.exponent >= EXPONENT_BAND.0 && f.exponent <= EXPONENT_BAND.1;
            outcome(
                in_band && duality_failures.is_empty(),
                format!(
                    "exponent {:.3} (residual {:.3}), duality violations {} {}",
                    f.exponent,
                    f.residual,
                    duality_failures.len(),
                    first(&duality_failures)
                ),
            )
        }
        None => outcome(false, "no fit"),
    }
}

fn report(failed: &mut usize, id: usize, name: &str, start: Instant, o: Outcome) {
    let status = if o.pass { "PASS" } else { "FAIL" };
    if !o.pass {
        *failed += 1;
    }
    println!("{status} criterion {id:>2} {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let t = Instant::now();
    report(&mut failed, 1, "bounds table", t, bounds_table());
    let t = Instant::now();
    report(&mut failed, 2, "undirected roundtrip stretch", t, undirected_roundtrip());
    let t = Instant::now();
    report(&mut failed, 3, "directed 7-stretch", t, directed_seven());
    let t = Instant::now();
    report(&mut failed, 4, "bounded-hop stretch", t, directed_hop());
    let t = Instant::now();
    let avg = average_runs();
    let stretch = outcome(
        avg.stretch_failures.is_empty() && avg.oracle_failures.is_empty(),
        format!(
            "{} routes, {} adaptive / {} oracle violations {}{}",
            avg.routes,
            avg.stretch_failures.len(),
            avg.oracle_failures.len(),
            first(&avg.stretch_failures),
            first(&avg.oracle_failures)
        ),
    );
    report(&mut failed, 5, "average stretch", t, stretch);
    let estimates = outcome(
        avg.delta_failures.is_empty() && avg.estimates > 0,
        format!(
            "{} estimates, {} updates, {} violations {}",
            avg.estimates,
            avg.updates,
            avg.delta_failures.len(),
            first(&avg.delta_failures)
        ),
    );
    report(&mut failed, 6, "estimate safety and growth", t, estimates);
    let t = Instant::now();
    report(&mut failed, 7, "set property suite", t, set_property_suite());
    let t = Instant::now();
    report(&mut failed, 8, "tree routing exactness", t, tree_routing());
    let t = Instant::now();
    report(&mut failed, 9, "storage scaling", t, storage_scaling());
    let violations = AUDIT.load(Ordering::Relaxed);
    let routes = AUDITED_ROUTES.load(Ordering::Relaxed);
    let audit = outcome(violations == 0 && routes > 0, format!("{routes} routes, {violations} violations"));
    report(&mut failed, 10, "locality audit", Instant::now(), audit);
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
