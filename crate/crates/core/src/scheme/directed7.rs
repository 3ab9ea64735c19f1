//! 7-stretch roundtrip routing for digraphs with `k = 3`.
//!
//! Every tree is a double tree: legs that end at a root climb the in-tree by
//! stored successor ports, legs that start at a root descend the out-tree by
//! labels. The ball tree of `v` spans `B_0(v)` and `p_1(v)`.
//!
//! Table families at `u`:
//! - `ball_dest`: out-labels of `B_0(u)` in u's own ball tree;
//! - `ball_member`: u's record in every ball tree it lies on;
//! - `top`: u's record in the cluster tree of each `w ∈ A_2`;
//! - `clean`: u's record in `T(C(w))` for `w ∈ B_1(u)` whose in-path from u
//!   stays inside `C(w)`;
//! - `dirty`: otherwise, the label of `w` in the top tree of `p_2(z)`, where
//!   `z` is the first vertex on that path outside `C(w)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_sizes, PreprocessError};
use crate::graph::{dijkstra, is_strongly_connected, Direction, Vertex, WeightedGraph};
use crate::hierarchy::{Hierarchy, RootedTree};
use crate::sim::{Decision, LocalView, RoutingScheme, SchemeError, Step, TreeRef};
use crate::tree_routing::{next_port, DoubleRecord, DoubleTreeScheme, Hop, InPart, TreeLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEntry {
    /// Whether u belongs to the ball itself, not just to a tree path.
    pub member: bool,
    pub record: DoubleRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D7Table {
    pub ball_dest: BTreeMap<Vertex, TreeLabel>,
    pub ball_member: BTreeMap<Vertex, BallEntry>,
    pub top: BTreeMap<Vertex, DoubleRecord>,
    pub clean: BTreeMap<Vertex, DoubleRecord>,
    /// `w -> (p_2(z), label of w in T(C(p_2(z))))`.
    pub dirty: BTreeMap<Vertex, (Vertex, TreeLabel)>,
}

impl D7Table {
    fn cluster_record(&self, center: Vertex) -> Option<&DoubleRecord> {
        self.top.get(&center).or_else(|| self.clean.get(&center))
    }

    fn record(&self, tree: TreeRef) -> Option<&DoubleRecord> {
        match tree {
            TreeRef::Ball(r) => self.ball_member.get(&r).map(|e| &e.record),
            TreeRef::Cluster(c) => self.cluster_record(c),
        }
    }

    /// Entry counts per family, in table order.
    pub fn family_sizes(&self) -> [usize; 5] {
        [self.ball_dest.len(), self.ball_member.len(), self.top.len(), self.clean.len(), self.dirty.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D7Label {
    pub id: Vertex,
    pub p1: Vertex,
    pub p2: Vertex,
    /// Label of `p_1(v)` in v's ball tree.
    pub p1_ball_label: TreeLabel,
    /// Label of `v` in the cluster tree of `p_2(v)`.
    pub top_label: TreeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegTarget {
    /// Climb to the root.
    Root,
    /// Descend from the root to a labelled vertex.
    Down(TreeLabel),
    /// Climb to the root, then descend.
    UpDown(TreeLabel),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub tree: TreeRef,
    pub target: LegTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D7Header {
    pub legs: Vec<Leg>,
    pub current: usize,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Directed7Scheme {
    pub graph: WeightedGraph,
    pub hierarchy: Hierarchy,
    pub tables: Vec<D7Table>,
    pub labels: Vec<D7Label>,
}

fn invariant(msg: String) -> PreprocessError {
    PreprocessError::Invariant(msg)
}

impl Directed7Scheme {
    pub fn preprocess(graph: WeightedGraph, hierarchy: Hierarchy) -> Result<Self, PreprocessError> {
        check_sizes(&graph, &hierarchy)?;
        if hierarchy.k != 3 {
            return Err(PreprocessError::WrongK { expected: 3, got: hierarchy.k });
        }
        if !is_strongly_connected(&graph) {
            return Err(PreprocessError::NotStronglyConnected);
        }
        let g = &graph;
        let h = &hierarchy;
        let n = g.n();

        // ball trees T(B_0(v)) over B_0(v) ∪ {p_1(v)}
        let balls: Vec<DoubleTreeScheme> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut members = h.bunches[v][0].clone();
                members.push(h.pivots[v][1]);
                DoubleTreeScheme::build(g, v, &members).map_err(|e| invariant(format!("ball tree of {v}: {e}")))
            })
            .collect::<Result<_, _>>()?;

        // cluster trees T(C(w)) for w ∈ A_1; in-trees double as the paths P(·, w)
        let centers = h.levels[1].clone();
        let built: Vec<(Vertex, DoubleTreeScheme, Vec<Option<Vertex>>)> = centers
            .par_iter()
            .map(|&w| {
                let out = dijkstra(g, w, Direction::Forward);
                let inn = dijkstra(g, w, Direction::Reverse);
                let members = h.clusters[w].iter().copied();
                let t_out = RootedTree::from_sssp(&out, members.clone())?;
                let t_in = RootedTree::from_sssp(&inn, members)?;
                Ok((w, DoubleTreeScheme::from_trees(g, &t_out, &t_in)?, inn.parent))
            })
            .collect::<Result<_, PreprocessError>>()?;
        let mut cluster: BTreeMap<Vertex, DoubleTreeScheme> = BTreeMap::new();
        let mut toward: BTreeMap<Vertex, Vec<Option<Vertex>>> = BTreeMap::new();
        for (w, t, succ) in built {
            cluster.insert(w, t);
            toward.insert(w, succ);
        }

        let mut tables: Vec<D7Table> = (0..n)
            .map(|_| D7Table {
                ball_dest: BTreeMap::new(),
                ball_member: BTreeMap::new(),
                top: BTreeMap::new(),
                clean: BTreeMap::new(),
                dirty: BTreeMap::new(),
            })
            .collect();

        for (r, ball) in balls.iter().enumerate() {
            for &w in &h.bunches[r][0] {
                tables[r].ball_dest.insert(w, ball.out_label(w).unwrap().clone());
            }
            for x in ball.vertices() {
                let record = ball.record(x).unwrap();
                let member = h.in_bunch_level(r, 0, x);
                tables[x].ball_member.insert(r, BallEntry { member, record });
            }
        }

        for &w in &h.levels[2] {
            let t = &cluster[&w];
            for (u, table) in tables.iter_mut().enumerate() {
                let record = t.record(u).ok_or_else(|| invariant(format!("{u} missing from top tree of {w}")))?;
                table.top.insert(w, record);
            }
        }

        for u in 0..n {
            for &w in &h.bunches[u][1] {
                let succ = &toward[&w];
                // walk P(u, w) and find the first vertex outside C(w)
                let mut x = u;
                let mut z = None;
                loop {
                    if !h.in_cluster(w, x) {
                        z = Some(x);
                        break;
                    }
                    match succ[x] {
                        Some(next) => x = next,
                        None => break,
                    }
                }
                match z {
                    None => {
                        let record =
                            cluster[&w].record(u).ok_or_else(|| invariant(format!("{u} missing from T(C({w}))")))?;
                        tables[u].clean.insert(w, record);
                    }
                    Some(z) => {
                        let top = h.pivots[z][2];
                        let label = cluster[&top]
                            .out_label(w)
                            .ok_or_else(|| invariant(format!("{w} missing from top tree of {top}")))?;
                        tables[u].dirty.insert(w, (top, label.clone()));
                    }
                }
            }
        }

        let labels = (0..n)
            .map(|v| {
                let (p1, p2) = (h.pivots[v][1], h.pivots[v][2]);
                Ok(D7Label {
                    id: v,
                    p1,
                    p2,
                    p1_ball_label: balls[v].out_label(p1).unwrap().clone(),
                    top_label: cluster[&p2]
                        .out_label(v)
                        .ok_or_else(|| invariant(format!("{v} missing from top tree of {p2}")))?
                        .clone(),
                })
            })
            .collect::<Result<_, PreprocessError>>()?;

        Ok(Self { graph, hierarchy, tables, labels })
    }

    fn plan(table: &D7Table, me: Vertex, dest: &D7Label) -> (&'static str, Vec<Leg>) {
        let v = dest.id;
        let finish = Leg { tree: TreeRef::Ball(v), target: LegTarget::Root };
        if let Some(label) = table.ball_dest.get(&v) {
            let leg = Leg { tree: TreeRef::Ball(me), target: LegTarget::Down(label.clone()) };
            return ("ball", vec![leg]);
        }
        if table.ball_member.get(&v).is_some_and(|e| e.member) {
            return ("in-ball-of-dest", vec![finish]);
        }
        if table.clean.contains_key(&dest.p1) {
            let leg = Leg { tree: TreeRef::Cluster(dest.p1), target: LegTarget::Root };
            return ("clean", vec![leg, finish]);
        }
        if let Some((top, label)) = table.dirty.get(&dest.p1) {
            let leg = Leg { tree: TreeRef::Cluster(*top), target: LegTarget::UpDown(label.clone()) };
            return ("dirty", vec![leg, finish]);
        }
        let leg = Leg { tree: TreeRef::Cluster(dest.p2), target: LegTarget::UpDown(dest.top_label.clone()) };
        ("top", vec![leg])
    }
}

fn climb(record: &DoubleRecord) -> Result<Option<Hop>, SchemeError> {
    match record.up {
        InPart::Root => Ok(None),
        InPart::Successor(p) => Ok(Some(Hop::Port(p))),
        InPart::Absent => Err(SchemeError::Invariant("vertex is not on the in-tree".into())),
    }
}

fn descend(record: &DoubleRecord, label: &TreeLabel) -> Result<Hop, SchemeError> {
    let out = record.out.as_ref().ok_or_else(|| SchemeError::Invariant("vertex is not on the out-tree".into()))?;
    Ok(next_port(out, label)?)
}

impl RoutingScheme for Directed7Scheme {
    type Table = D7Table;
    type Label = D7Label;
    type Header = D7Header;

    fn tag(&self) -> &'static str {
        "directed-7"
    }

    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn table(&self, v: Vertex) -> &D7Table {
        &self.tables[v]
    }

    fn label(&self, v: Vertex) -> &D7Label {
        &self.labels[v]
    }

    fn step(
        view: &mut LocalView<'_, D7Table, D7Label>,
        header: Option<D7Header>,
    ) -> Result<Step<D7Header>, SchemeError> {
        let me = view.label().id;
        let table = view.table();
        let mut header = match header {
            Some(h) => h,
            None => {
                let dest = view.dest_label();
                if dest.id == me {
                    return Ok(Step::Deliver);
                }
                let (case, legs) = Self::plan(table, me, dest);
                view.log(Decision::Case { name: case.into() });
                view.log(Decision::Tree { tree: legs[0].tree });
                D7Header { legs, current: 0, descending: false }
            }
        };
        loop {
            let leg = &header.legs[header.current];
            let tree_id = match leg.tree {
                TreeRef::Ball(r) | TreeRef::Cluster(r) => r,
            };
            let record = table.record(leg.tree).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: tree_id })?;
            let hop = match &leg.target {
                LegTarget::Root => climb(record)?.unwrap_or(Hop::Deliver),
                LegTarget::Down(label) => descend(record, label)?,
                LegTarget::UpDown(label) => match header.descending {
                    true => descend(record, label)?,
                    false => match climb(record)? {
                        Some(hop) => hop,
                        None => {
                            header.descending = true;
                            descend(record, label)?
                        }
                    },
                },
            };
            match hop {
                Hop::Port(port) => return Ok(Step::Forward { port, header }),
                Hop::Deliver if header.current + 1 < header.legs.len() => {
                    header.current += 1;
                    header.descending = false;
                    view.log(Decision::Tree { tree: header.legs[header.current].tree });
                }
                Hop::Deliver => return Ok(Step::Deliver),
            }
        }
    }

    fn header_words(h: &D7Header) -> usize {
        2 + h
            .legs
            .iter()
            .map(|l| {
                2 + match &l.target {
                    LegTarget::Root => 0,
                    LegTarget::Down(x) | LegTarget::UpDown(x) => x.words(),
                }
            })
            .sum::<usize>()
    }

    fn table_entries(&self, v: Vertex) -> usize {
        self.tables[v].family_sizes().iter().sum()
    }

    fn table_words(&self, v: Vertex) -> usize {
        let t = &self.tables[v];
        t.ball_dest.values().map(|l| 1 + l.words()).sum::<usize>()
            + t.ball_member.values().map(|e| 2 + e.record.words()).sum::<usize>()
            + t.top.values().map(|r| 1 + r.words()).sum::<usize>()
            + t.clean.values().map(|r| 1 + r.words()).sum::<usize>()
            + t.dirty.values().map(|(_, l)| 2 + l.words()).sum::<usize>()
    }

    fn label_words(&self, v: Vertex) -> usize {
        let l = &self.labels[v];
        3 + l.p1_ball_label.words() + l.top_label.words()
    }
}
