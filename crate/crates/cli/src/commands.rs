use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use num::{BigInt, BigRational};
use thiserror::Error;

use compact_routing::analysis::{bound_rows, bounds_csv, storage_csv, storage_report, StorageSample};
use compact_routing::graph::{
    dijkstra, generate, is_connected, is_strongly_connected, read_graph, write_graph, Direction, DistanceOracle,
    GeneratorConfig, GraphKind, Length, INFINITE,
};
use compact_routing::hierarchy::{build_with_oracle, HierarchyConfig};
use compact_routing::scheme::{stretch_bound, PreprocessError, SchemeKind, SchemeState, StateMeta};
use compact_routing::sim::{EvalError, EvalOptions, EvalReport, PairSet, RouteError, SchemeError};

use crate::config::Config;
use crate::{BoundsArgs, EvalArgs, GenArgs, PreprocessArgs, RouteArgs, StatsArgs};

pub const EVAL_HEADER: &str =
    "# compact-routing eval v1\nu,v,d_uv,d_vu,routed_uv,routed_vu,stretch_uv,stretch_vu,roundtrip_stretch";

const DEFAULT_K_LIST: &str = "4,6,8,10,20,100";

/// A routed length above the scheme's guarantee, or a locality audit failure.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct GuaranteeViolation(String);

/// Errors raised by a scheme misbehaving rather than by bad input.
pub fn is_invariant_violation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<GuaranteeViolation>()
            || e.is::<RouteError>()
            || e.is::<EvalError>()
            || e.is::<SchemeError>()
            || matches!(
                e.downcast_ref::<PreprocessError>(),
                Some(PreprocessError::Invariant(_) | PreprocessError::Tree(_))
            )
    })
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_state(path: &Path) -> Result<(StateMeta, SchemeState)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SchemeState::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn default_density(kind: GraphKind, n: usize) -> f64 {
    let n = n.max(2) as f64;
    let v = match kind {
        GraphKind::ErdosRenyi => 2.0 * n.ln() / n,
        GraphKind::RandomGeometric => (2.0 * n.ln() / (std::f64::consts::PI * n)).sqrt(),
        GraphKind::DirectedStronglyConnected => 4.0 / n,
    };
    v.min(1.0)
}

pub fn gen(cfg: &Config, a: &GenArgs) -> Result<()> {
    let kind: GraphKind =
        cfg.resolve(a.kind.clone(), "kind", "erdos-renyi".to_string())?.parse().map_err(|e: String| anyhow!(e))?;
    let n: usize = cfg.resolve_opt(a.n, "n")?.ok_or_else(|| anyhow!("--n is required (flag or config key `n`)"))?;
    let density = cfg.resolve(a.density, "density", default_density(kind, n))?;
    let wmin = cfg.resolve(a.wmin, "wmin", 1)?;
    let wmax = cfg.resolve(a.wmax, "wmax", 100)?;
    let seed = cfg.resolve(a.seed, "seed", 0)?;
    let g = generate(&GeneratorConfig::new(kind, n, density, seed).weights(wmin, wmax))?;
    write_or_print(a.output.as_deref(), &write_graph(&g))
}

pub fn preprocess(cfg: &Config, a: &PreprocessArgs) -> Result<()> {
    let kind: SchemeKind = cfg
        .resolve_opt(a.scheme.clone(), "scheme")?
        .ok_or_else(|| anyhow!("--scheme is required (flag or config key `scheme`)"))?
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    let k = cfg.resolve(a.k, "k", 3)?;
    let seed = cfg.resolve(a.seed, "seed", 0)?;
    let budget: f64 = cfg.resolve(a.budget, "budget", 3.0)?;
    let augment = a.augment || cfg.resolve(None, "augment", false)?;
    ensure!(budget > 0.0, "--budget must be positive, got {budget}");

    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut g = read_graph(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let n = g.n();
    let connected = if g.is_directed() { is_strongly_connected(&g) } else { is_connected(&g) };
    let mut dummy = None;
    if !connected {
        ensure!(augment, "input graph is not connected; pass --augment to add a dummy vertex");
        let (aug, d) = g.augment();
        let w = aug.weight(0, d).unwrap_or(INFINITE);
        g = aug;
        dummy = Some((d, w));
    }

    let oracle = DistanceOracle::new(&g);
    let hcfg = HierarchyConfig::new(k, seed).budget(budget).bound_first_clusters(kind == SchemeKind::Directed7);
    let h = build_with_oracle(&oracle, hcfg)?;
    let state = SchemeState::preprocess(kind, g, h)?;
    let meta = StateMeta { k, seed: state.hierarchy().seed, n, budget, dummy };
    fs::write(&a.output, state.to_json(&meta)).with_context(|| format!("writing {}", a.output.display()))?;
    let stats = state.storage(dummy.map(|d| d.0));
    println!(
        "{kind} k={k} n={n} seed={}: avg {:.2} entries, max {} entries",
        meta.seed, stats.avg_entries, stats.max_entries
    );
    Ok(())
}

fn check_vertex(meta: &StateMeta, v: usize, flag: &str) -> Result<()> {
    ensure!(v < meta.n, "-{flag} {v} is out of range for a graph on {} vertices", meta.n);
    Ok(())
}

pub fn route(_cfg: &Config, a: &RouteArgs) -> Result<()> {
    let (meta, state) = load_state(&a.state)?;
    check_vertex(&meta, a.s, "s")?;
    check_vertex(&meta, a.t, "t")?;
    let trace = state.route(a.s, a.t)?;
    if let Some(p) = &a.trace {
        fs::write(p, trace.render()).with_context(|| format!("writing {}", p.display()))?;
    }
    let distance = dijkstra(state.graph(), a.s, Direction::Forward).dist[a.t];
    println!("length {}", trace.length);
    println!("distance {distance}");
    println!("hops {}", trace.hops());
    if a.s == a.t {
        println!("stretch exact");
    } else {
        println!("stretch {:.4}", trace.length as f64 / distance as f64);
    }
    ensure!(
        trace.audit_violations == 0,
        GuaranteeViolation(format!("{} locality violations on this route", trace.audit_violations))
    );
    Ok(())
}

fn eval_csv(report: &EvalReport, meta: &StateMeta, pairs: &str) -> String {
    let mut out = format!("{EVAL_HEADER}\n");
    for p in &report.pairs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            p.u,
            p.v,
            p.d_uv,
            p.d_vu,
            p.routed_uv,
            p.routed_vu,
            p.stretch_uv(),
            p.stretch_vu(),
            p.roundtrip_stretch()
        );
    }
    let _ = writeln!(out, "# scheme={} k={} n={} seed={} pairs={pairs}", report.scheme, report.k, meta.n, report.seed);
    for (key, value) in summary(report) {
        let _ = writeln!(out, "# {key}={value}");
    }
    out
}

fn summary(r: &EvalReport) -> Vec<(&'static str, String)> {
    vec![
        ("routed_pairs", r.pairs.len().to_string()),
        ("max_one_way_stretch", format!("{:.6}", r.max_one_way_stretch)),
        ("avg_one_way_stretch", format!("{:.6}", r.avg_one_way_stretch)),
        ("max_roundtrip_stretch", format!("{:.6}", r.max_roundtrip_stretch)),
        ("avg_roundtrip_stretch", format!("{:.6}", r.avg_roundtrip_stretch)),
        ("avg_table_entries", format!("{:.4}", r.storage.avg_entries)),
        ("max_table_entries", r.storage.max_entries.to_string()),
        ("max_label_words", r.max_label_words.to_string()),
        ("max_header_words", r.max_header_words.to_string()),
        ("max_hops", r.max_hops.to_string()),
        ("audit_violations", r.audit_violations.to_string()),
    ]
}

/// First pair whose routes exceed the scheme's stretch guarantee.
fn guarantee_violation(kind: SchemeKind, report: &EvalReport) -> Option<String> {
    let k = report.k as u64;
    match kind {
        SchemeKind::UndirectedRt | SchemeKind::DirectedHop | SchemeKind::Directed7 => {
            let bound = if kind == SchemeKind::Directed7 { 7 } else { 2 * k - 1 };
            report
                .pairs
                .iter()
                .find(|p| !p.roundtrip_within(bound, 1))
                .map(|p| format!("pair ({}, {}) exceeds roundtrip stretch {bound}", p.u, p.v))
        }
        SchemeKind::Average => {
            let bound = stretch_bound(report.k);
            let within = |routed: Length, d: Length| {
                BigRational::from_integer(BigInt::from(routed)) <= &bound * BigRational::from_integer(BigInt::from(d))
            };
            report
                .pairs
                .iter()
                .find(|p| !within(p.routed_uv, p.d_uv) || !within(p.routed_vu, p.d_vu))
                .map(|p| format!("pair ({}, {}) exceeds one-way stretch {bound}", p.u, p.v))
        }
    }
}

pub fn eval(cfg: &Config, a: &EvalArgs) -> Result<()> {
    let pairs_text = cfg.resolve(a.pairs.clone(), "pairs", "all".to_string())?;
    let pairs: PairSet = pairs_text.parse().map_err(|e: String| anyhow!(e))?;
    let jobs = cfg.resolve_opt(a.jobs, "jobs")?;
    let hop_budget = cfg.resolve_opt(a.hop_budget, "hop-budget")?;
    if let Some(j) = jobs {
        ensure!(j > 0, "--jobs must be at least 1");
    }
    let (meta, state) = load_state(&a.state)?;
    let oracle = DistanceOracle::new(state.graph());
    let mut opts = EvalOptions::new(pairs);
    opts.dummy = meta.dummy;
    opts.hop_budget = hop_budget;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?;
    let report = pool.install(|| state.evaluate(&oracle, &opts))?;
    fs::write(&a.output, eval_csv(&report, &meta, &pairs_text))
        .with_context(|| format!("writing {}", a.output.display()))?;
    if let Some(p) = &a.json {
        let text = serde_json::to_string_pretty(&report)?;
        fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    println!("scheme {} k={} n={}", report.scheme, report.k, meta.n);
    for (key, value) in summary(&report) {
        println!("{key} {value}");
    }
    if let Some(msg) = guarantee_violation(state.kind(), &report) {
        bail!(GuaranteeViolation(msg));
    }
    ensure!(
        report.audit_violations == 0,
        GuaranteeViolation(format!("{} locality violations", report.audit_violations))
    );
    Ok(())
}

fn parse_k_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            let k: usize = s.trim().parse().with_context(|| format!("bad k `{}`", s.trim()))?;
            ensure!(k >= 2, "k must be at least 2, got {k}");
            Ok(k)
        })
        .collect()
}

pub fn bounds(cfg: &Config, a: &BoundsArgs) -> Result<()> {
    let ks = parse_k_list(&cfg.resolve(a.k_list.clone(), "k-list", DEFAULT_K_LIST.to_string())?)?;
    write_or_print(a.output.as_deref(), &bounds_csv(&bound_rows(&ks)))
}

pub fn stats(_cfg: &Config, a: &StatsArgs) -> Result<()> {
    let mut files: Vec<_> = fs::read_dir(&a.states)
        .with_context(|| format!("listing {}", a.states.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    ensure!(!files.is_empty(), "no *.json state files in {}", a.states.display());
    let mut samples = Vec::with_capacity(files.len());
    for p in &files {
        let (meta, state) = load_state(p)?;
        let st = state.storage(meta.dummy.map(|d| d.0));
        samples.push(StorageSample {
            scheme: state.kind().name().to_string(),
            k: meta.k,
            n: meta.n,
            seed: meta.seed,
            avg_entries: st.avg_entries,
            max_entries: st.max_entries,
            total_entries: st.total_entries,
        });
    }
    write_or_print(a.output.as_deref(), &storage_csv(&storage_report(&samples)))
}
