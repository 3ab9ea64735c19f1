//! Average-storage routing for undirected graphs.
//!
//! Tables hold u's record in every cluster tree of a center in `B(u)` plus,
//! for a center u, the labels of all members of `C(u)` in `T(C(u))`. Labels
//! carry the pivot distances `h_i(v)`, which let the source bound `d(u, v)`
//! from below and decide when a detour to one of its own pivots is worth it.
//!
//! [`AverageScheme`] runs the adaptive router that maintains a lower bound
//! `δ̂` on `d(u, v)`. [`AverageOracleScheme`] is the testing variant that is
//! told `d(u, v)` up front.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use super::undirected_rt::CenterEntry;
use super::{check_sizes, cluster_trees, PreprocessError};
use crate::graph::{Length, Vertex, WeightedGraph, INFINITE};
use crate::hierarchy::Hierarchy;
use crate::sim::{Decision, LocalView, RoutingScheme, SchemeError, Step, TreeRef};
use crate::tree_routing::{next_port, toward_root, Hop, TreeLabel};

/// Detour thresholds `c_0..=c_a` with `c_0 = 1` and
/// `c_i = 2 - (a - i) / (a + c_0 + ... + c_{i-1})`, exactly.
///
/// Denominators roughly square with every step, so this is only practical
/// for `a` up to about 12. Use [`c_sequence_f64`] beyond that.
pub fn c_sequence(a: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(a + 1);
    let mut sum = BigRational::zero();
    let a_r = BigRational::from_integer(BigInt::from(a));
    for i in 0..=a {
        let c = if i == 0 {
            BigRational::one()
        } else {
            let two = BigRational::from_integer(BigInt::from(2));
            let num = BigRational::from_integer(BigInt::from(a - i));
            two - num / (&a_r + &sum)
        };
        sum += &c;
        out.push(c);
    }
    out
}

/// [`c_sequence`] in floating point.
pub fn c_sequence_f64(a: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(a + 1);
    let mut sum = 0.0;
    for i in 0..=a {
        let c = if i == 0 { 1.0 } else { 2.0 - (a - i) as f64 / (a as f64 + sum) };
        sum += c;
        out.push(c);
    }
    out
}

fn bound_from_sum<T>(k: usize, sum: T, lift: impl Fn(usize) -> T) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let a = (k - 1) / 2;
    let extra = if k.is_multiple_of(2) { 2 * a + 1 } else { 2 * a - 1 };
    lift(2) * sum + lift(extra)
}

/// Worst-case one-way stretch of [`AverageScheme`] for `k >= 2`, exactly.
/// Same cost caveat as [`c_sequence`].
pub fn stretch_bound(k: usize) -> BigRational {
    assert!(k >= 2, "stretch_bound needs k >= 2");
    let sum: BigRational = c_sequence((k - 1) / 2).into_iter().sum();
    bound_from_sum(k, sum, |x| BigRational::from_integer(BigInt::from(x)))
}

/// [`stretch_bound`] in floating point; agrees with it to 1e-9 where both
/// can be computed.
pub fn stretch_bound_f64(k: usize) -> f64 {
    assert!(k >= 2, "stretch_bound needs k >= 2");
    let sum: f64 = c_sequence_f64((k - 1) / 2).into_iter().sum();
    bound_from_sum(k, sum, |x| x as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgTable {
    pub centers: BTreeMap<Vertex, CenterEntry>,
    /// For every `w ∈ C(u)`, w's label in `T(C(u))`.
    pub members: BTreeMap<Vertex, TreeLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgLevel {
    pub pivot: Vertex,
    /// `d(v, p_i(v))`.
    pub h: Length,
    /// v's label in the pivot's cluster tree.
    pub label: TreeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgLabel {
    pub id: Vertex,
    pub levels: Vec<AvgLevel>,
}

impl AvgLabel {
    /// `h_i(v)` with `h_k(v)` infinite.
    pub fn h(&self, i: usize) -> Length {
        self.levels.get(i).map_or(INFINITE, |l| l.h)
    }

    pub fn words(&self) -> usize {
        1 + self.levels.iter().map(|l| 2 + l.label.words()).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    ToPivot,
    Return,
    ToDest,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgHeader {
    pub phase: Phase,
    /// Loop index of the pending detour.
    pub i: usize,
    /// Number of failed detours so far.
    pub r: usize,
    pub delta: i64,
    pub tree: Vertex,
    /// Source's label in `tree`, used to come back after a miss.
    pub return_label: TreeLabel,
    /// Destination's label in `tree`, once known.
    pub dest: Option<TreeLabel>,
    /// `h_0(v)..h_{k-1}(v)`, copied from the destination label at the source.
    pub dest_h: Vec<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageScheme {
    pub graph: WeightedGraph,
    pub hierarchy: Hierarchy,
    pub tables: Vec<AvgTable>,
    pub labels: Vec<AvgLabel>,
}

impl AverageScheme {
    pub fn preprocess(graph: WeightedGraph, hierarchy: Hierarchy) -> Result<Self, PreprocessError> {
        if graph.is_directed() {
            return Err(PreprocessError::DirectedInput);
        }
        check_sizes(&graph, &hierarchy)?;
        let trees = cluster_trees(&graph, &hierarchy)?;
        let h = &hierarchy;
        let n = graph.n();
        let mut tables = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for u in 0..n {
            let mut centers = BTreeMap::new();
            for (level, bunch) in h.bunches[u].iter().enumerate() {
                for &c in bunch {
                    let t = &trees[c];
                    let (record, label) = t
                        .record(u)
                        .zip(t.label(u))
                        .ok_or_else(|| PreprocessError::Invariant(format!("{u} is in C({c}) but not in its tree")))?;
                    let entry = CenterEntry { level, record: record.clone(), label: label.clone() };
                    centers.insert(c, entry);
                }
            }
            let members = h.clusters[u]
                .iter()
                .map(|&w| {
                    trees[u]
                        .label(w)
                        .map(|l| (w, l.clone()))
                        .ok_or_else(|| PreprocessError::Invariant(format!("{w} missing from T(C({u}))")))
                })
                .collect::<Result<_, _>>()?;
            tables.push(AvgTable { centers, members });
            let levels = (0..h.k)
                .map(|i| {
                    let p = h.pivots[u][i];
                    trees[p].label(u).map(|l| AvgLevel { pivot: p, h: h.h[u][i], label: l.clone() }).ok_or_else(|| {
                        PreprocessError::Invariant(format!("{u} missing from the tree of its pivot {p}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            labels.push(AvgLabel { id: u, levels });
        }
        Ok(Self { graph, hierarchy, tables, labels })
    }

    /// `min{i : p_i(v) ∈ B(u)}`.
    pub fn first_level(table: &AvgTable, dest: &AvgLabel) -> Option<usize> {
        dest.levels.iter().position(|l| table.centers.contains_key(&l.pivot))
    }

    /// Initial estimate `max_{i < ℓ} (h_{i+1}(u) - h_i(v))`, 0 when `ℓ = 0`.
    pub fn initial_estimate(own: &AvgLabel, dest: &AvgLabel, ell: usize) -> i64 {
        (0..ell).map(|i| own.h(i + 1) as i64 - dest.h(i) as i64).max().unwrap_or(0)
    }
}

fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `h_{2i+1}(v) > h_{2i}(u) + c_i · δ̂`, exactly.
fn detour_fires(h_next_v: Length, h_u: Length, c: &BigRational, delta: i64) -> bool {
    if h_next_v == INFINITE {
        return true;
    }
    rational(h_next_v as i64) > rational(h_u as i64) + c * rational(delta)
}

fn forward(hop: Hop, header: AvgHeader) -> Step<AvgHeader> {
    match hop {
        Hop::Port(port) => Step::Forward { port, header },
        Hop::Deliver => Step::Deliver,
    }
}

/// Resumes the detour loop at the source from iteration `start`.
fn resume(
    view: &mut LocalView<'_, AvgTable, AvgLabel>,
    me: Vertex,
    start: usize,
    mut r: usize,
    mut delta: i64,
    dest_h: Vec<Length>,
) -> Result<Step<AvgHeader>, SchemeError> {
    let table = view.table();
    let own = view.label();
    let dest = view.dest_label();
    let h_v = |i: usize| dest_h.get(i).copied().unwrap_or(INFINITE);
    let ell = AverageScheme::first_level(table, dest)
        .ok_or_else(|| SchemeError::Invariant(format!("no pivot of {} in B({me})", dest.id)))?;
    let a = ell / 2;
    let c = c_sequence(a);
    for i in start..=a {
        if !detour_fires(h_v(2 * i + 1), own.h(2 * i), &c[i], delta) {
            continue;
        }
        let level = &own.levels[2 * i];
        let pivot = level.pivot;
        view.log(Decision::Detour { i, pivot });
        if pivot == me {
            match table.members.get(&dest.id) {
                Some(label) => {
                    view.log(Decision::Hit { pivot });
                    let entry =
                        table.centers.get(&pivot).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: pivot })?;
                    let hop = next_port(&entry.record, label)?;
                    let header = AvgHeader {
                        phase: Phase::ToDest,
                        i,
                        r,
                        delta,
                        tree: pivot,
                        return_label: level.label.clone(),
                        dest: Some(label.clone()),
                        dest_h,
                    };
                    return Ok(forward(hop, header));
                }
                None => {
                    view.log(Decision::Miss { pivot });
                    r += 1;
                    delta = miss_estimate(h_v(2 * i + 1), own.h(2 * i))?;
                    view.log(Decision::DeltaUpdate { r, j: i, value: delta });
                    continue;
                }
            }
        }
        let entry = table.centers.get(&pivot).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: pivot })?;
        let header = AvgHeader {
            phase: Phase::ToPivot,
            i,
            r,
            delta,
            tree: pivot,
            return_label: level.label.clone(),
            dest: None,
            dest_h,
        };
        return Ok(forward(toward_root(&entry.record)?, header));
    }
    let target = &dest.levels[ell];
    view.log(Decision::Tree { tree: TreeRef::Cluster(target.pivot) });
    let entry =
        table.centers.get(&target.pivot).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: target.pivot })?;
    let hop = next_port(&entry.record, &target.label)?;
    let header = AvgHeader {
        phase: Phase::Final,
        i: a + 1,
        r,
        delta,
        tree: target.pivot,
        return_label: own.levels[0].label.clone(),
        dest: Some(target.label.clone()),
        dest_h,
    };
    Ok(forward(hop, header))
}

fn miss_estimate(h_next_v: Length, h_u: Length) -> Result<i64, SchemeError> {
    if h_next_v == INFINITE {
        return Err(SchemeError::Invariant("top-level cluster missed its member".into()));
    }
    Ok(h_next_v as i64 - h_u as i64)
}

impl RoutingScheme for AverageScheme {
    type Table = AvgTable;
    type Label = AvgLabel;
    type Header = AvgHeader;

    fn tag(&self) -> &'static str {
        "average"
    }

    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn table(&self, v: Vertex) -> &AvgTable {
        &self.tables[v]
    }

    fn label(&self, v: Vertex) -> &AvgLabel {
        &self.labels[v]
    }

    fn step(
        view: &mut LocalView<'_, AvgTable, AvgLabel>,
        header: Option<AvgHeader>,
    ) -> Result<Step<AvgHeader>, SchemeError> {
        let me = view.label().id;
        let Some(mut header) = header else {
            let dest = view.dest_label();
            if dest.id == me {
                return Ok(Step::Deliver);
            }
            let own = view.label();
            let table = view.table();
            let ell = Self::first_level(table, dest)
                .ok_or_else(|| SchemeError::Invariant(format!("no pivot of {} in B({me})", dest.id)))?;
            let delta = Self::initial_estimate(own, dest, ell);
            let dest_h = dest.levels.iter().map(|l| l.h).collect();
            view.log(Decision::Level { level: ell });
            view.log(Decision::DeltaInit { a: ell / 2, value: delta });
            return resume(view, me, 0, 0, delta, dest_h);
        };
        let table = view.table();
        let entry =
            table.centers.get(&header.tree).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: header.tree })?;
        match header.phase {
            Phase::ToPivot => match toward_root(&entry.record)? {
                Hop::Port(port) => Ok(Step::Forward { port, header }),
                Hop::Deliver => {
                    let dest = view.dest_label().id;
                    match table.members.get(&dest) {
                        Some(label) => {
                            view.log(Decision::Hit { pivot: me });
                            header.phase = Phase::ToDest;
                            header.dest = Some(label.clone());
                            Ok(forward(next_port(&entry.record, label)?, header))
                        }
                        None => {
                            view.log(Decision::Miss { pivot: me });
                            header.phase = Phase::Return;
                            let hop = next_port(&entry.record, &header.return_label)?;
                            match hop {
                                Hop::Port(port) => Ok(Step::Forward { port, header }),
                                Hop::Deliver => Err(SchemeError::Invariant("pivot detour started at the pivot".into())),
                            }
                        }
                    }
                }
            },
            Phase::Return => match next_port(&entry.record, &header.return_label)? {
                Hop::Port(port) => Ok(Step::Forward { port, header }),
                Hop::Deliver => {
                    let own = view.label();
                    let i = header.i;
                    let h_v = header.dest_h.get(2 * i + 1).copied().unwrap_or(INFINITE);
                    let r = header.r + 1;
                    let delta = miss_estimate(h_v, own.h(2 * i))?;
                    view.log(Decision::DeltaUpdate { r, j: i, value: delta });
                    resume(view, me, i + 1, r, delta, header.dest_h)
                }
            },
            Phase::ToDest | Phase::Final => {
                let dest = header.dest.as_ref().ok_or(SchemeError::MissingHeader)?;
                Ok(forward(next_port(&entry.record, dest)?, header))
            }
        }
    }

    fn header_words(h: &AvgHeader) -> usize {
        5 + h.return_label.words() + h.dest.as_ref().map_or(0, |l| l.words()) + h.dest_h.len()
    }

    fn table_entries(&self, v: Vertex) -> usize {
        self.tables[v].centers.len() + self.tables[v].members.len()
    }

    fn table_words(&self, v: Vertex) -> usize {
        let t = &self.tables[v];
        t.centers.values().map(|e| 1 + e.words()).sum::<usize>()
            + t.members.values().map(|l| 1 + l.words()).sum::<usize>()
    }

    fn label_words(&self, v: Vertex) -> usize {
        self.labels[v].words()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleHeader {
    pub tree: Vertex,
    /// `None` while still climbing to the root of `tree`.
    pub dest: Option<TreeLabel>,
}

/// Router that is handed `d(u, v)` at the source.
///
/// When the pivot inequality fires for level `i`, v is a member of
/// `C(p_i(u))` but u does not know v's label there, so the message climbs
/// to `p_i(u)`, which stores it, and descends from there.
#[derive(Debug, Clone, Copy)]
pub struct AverageOracleScheme<'a> {
    pub inner: &'a AverageScheme,
}

impl<'a> AverageOracleScheme<'a> {
    pub fn new(inner: &'a AverageScheme) -> Self {
        Self { inner }
    }
}

impl RoutingScheme for AverageOracleScheme<'_> {
    type Table = AvgTable;
    type Label = AvgLabel;
    type Header = OracleHeader;

    fn tag(&self) -> &'static str {
        "average-oracle"
    }

    fn graph(&self) -> &WeightedGraph {
        &self.inner.graph
    }

    fn hierarchy(&self) -> &Hierarchy {
        &self.inner.hierarchy
    }

    fn table(&self, v: Vertex) -> &AvgTable {
        &self.inner.tables[v]
    }

    fn label(&self, v: Vertex) -> &AvgLabel {
        &self.inner.labels[v]
    }

    fn step(
        view: &mut LocalView<'_, AvgTable, AvgLabel>,
        header: Option<OracleHeader>,
    ) -> Result<Step<OracleHeader>, SchemeError> {
        let me = view.label().id;
        let table = view.table();
        let header = match header {
            Some(h) => h,
            None => {
                let dest = view.dest_label();
                if dest.id == me {
                    return Ok(Step::Deliver);
                }
                let d = view.hint().ok_or(SchemeError::MissingHint)?;
                let own = view.label();
                let mut chosen = None;
                for (i, level) in dest.levels.iter().enumerate() {
                    if table.centers.get(&level.pivot).is_some_and(|e| e.level == i) {
                        view.log(Decision::Case { name: "dest-pivot".into() });
                        chosen = Some(OracleHeader { tree: level.pivot, dest: Some(level.label.clone()) });
                        break;
                    }
                    let next = dest.h(i + 1);
                    if next == INFINITE || next > own.h(i).saturating_add(d) {
                        view.log(Decision::Case { name: "own-pivot".into() });
                        chosen = Some(OracleHeader { tree: own.levels[i].pivot, dest: None });
                        break;
                    }
                }
                let header =
                    chosen.ok_or_else(|| SchemeError::Invariant(format!("no level routes {me} to {}", dest.id)))?;
                view.log(Decision::Tree { tree: TreeRef::Cluster(header.tree) });
                header
            }
        };
        let mut header = header;
        let entry =
            table.centers.get(&header.tree).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: header.tree })?;
        if header.dest.is_none() {
            if let Hop::Port(port) = toward_root(&entry.record)? {
                return Ok(Step::Forward { port, header });
            }
            let dest = view.dest_label().id;
            let label = table
                .members
                .get(&dest)
                .ok_or_else(|| SchemeError::Invariant(format!("{dest} is not a member of C({me})")))?;
            header.dest = Some(label.clone());
        }
        let hop = next_port(&entry.record, header.dest.as_ref().unwrap())?;
        Ok(forward_oracle(hop, header))
    }

    fn header_words(h: &OracleHeader) -> usize {
        1 + h.dest.as_ref().map_or(0, |l| l.words())
    }

    fn table_entries(&self, v: Vertex) -> usize {
        self.inner.table_entries(v)
    }

    fn table_words(&self, v: Vertex) -> usize {
        self.inner.table_words(v)
    }

    fn label_words(&self, v: Vertex) -> usize {
        self.inner.label_words(v)
    }

    fn uses_distance_hint(&self) -> bool {
        true
    }
}

fn forward_oracle(hop: Hop, header: OracleHeader) -> Step<OracleHeader> {
    match hop {
        Hop::Port(port) => Step::Forward { port, header },
        Hop::Deliver => Step::Deliver,
    }
}
