//! `(2k-1)`-stretch roundtrip routing for digraphs of bounded hop diameter.
//!
//! Tables and labels store whole port paths: `RT(u)` the shortest path to
//! every bunch member, `L(v)` the shortest path from every pivot of `v`. The
//! source glues two of them into the header and intermediate vertices just
//! follow it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_sizes, PreprocessError};
use crate::graph::{dijkstra, is_strongly_connected, Direction, Port, Vertex, WeightedGraph};
use crate::hierarchy::Hierarchy;
use crate::sim::{Decision, LocalView, RoutingScheme, SchemeError, Step};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopTable {
    /// Ports of `P(u, x)` for every `x ∈ B(u)`.
    pub paths: BTreeMap<Vertex, Vec<Port>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopLabel {
    pub id: Vertex,
    /// `(p_i(v), ports of P(p_i(v), v))` for `i < k`.
    pub levels: Vec<(Vertex, Vec<Port>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopHeader {
    pub ports: Vec<Port>,
    pub next: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedHopScheme {
    pub graph: WeightedGraph,
    pub hierarchy: Hierarchy,
    /// Largest hop count of any shortest path.
    pub hop_diameter: usize,
    pub tables: Vec<HopTable>,
    pub labels: Vec<HopLabel>,
}

impl DirectedHopScheme {
    pub fn preprocess(graph: WeightedGraph, hierarchy: Hierarchy) -> Result<Self, PreprocessError> {
        check_sizes(&graph, &hierarchy)?;
        if !is_strongly_connected(&graph) {
            return Err(PreprocessError::NotStronglyConnected);
        }
        let n = graph.n();
        let h = &hierarchy;
        let g = &graph;
        let forward: Vec<_> = (0..n).into_par_iter().map(|s| dijkstra(g, s, Direction::Forward)).collect();
        let hop_diameter = forward.iter().flat_map(|r| (0..n).filter_map(|v| r.hops(v))).max().unwrap_or(0);
        let tables = (0..n)
            .map(|u| HopTable {
                paths: h.bunch(u).into_iter().map(|x| (x, forward[u].port_path(x).unwrap())).collect(),
            })
            .collect();
        let labels = (0..n)
            .map(|v| HopLabel {
                id: v,
                levels: h.pivots[v].iter().map(|&p| (p, forward[p].port_path(v).unwrap())).collect(),
            })
            .collect();
        Ok(Self { graph, hierarchy, hop_diameter, tables, labels })
    }
}

impl RoutingScheme for DirectedHopScheme {
    type Table = HopTable;
    type Label = HopLabel;
    type Header = HopHeader;

    fn tag(&self) -> &'static str {
        "directed-hop"
    }

    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn table(&self, v: Vertex) -> &HopTable {
        &self.tables[v]
    }

    fn label(&self, v: Vertex) -> &HopLabel {
        &self.labels[v]
    }

    fn step(
        view: &mut LocalView<'_, HopTable, HopLabel>,
        header: Option<HopHeader>,
    ) -> Result<Step<HopHeader>, SchemeError> {
        let mut header = match header {
            Some(h) => h,
            None => {
                let me = view.label().id;
                let dest = view.dest_label();
                if dest.id == me {
                    return Ok(Step::Deliver);
                }
                let table = view.table();
                let (level, (pivot, tail)) = dest
                    .levels
                    .iter()
                    .enumerate()
                    .find(|(_, (p, _))| table.paths.contains_key(p))
                    .ok_or_else(|| SchemeError::Invariant(format!("no pivot of {} in B({me})", dest.id)))?;
                let mut ports = table.paths[pivot].clone();
                ports.extend_from_slice(tail);
                view.log(Decision::Level { level });
                view.log(Decision::HeaderPath { ports: ports.len() });
                HopHeader { ports, next: 0 }
            }
        };
        match header.ports.get(header.next) {
            Some(&port) => {
                header.next += 1;
                Ok(Step::Forward { port, header })
            }
            None => Ok(Step::Deliver),
        }
    }

    fn header_words(h: &HopHeader) -> usize {
        1 + h.ports.len()
    }

    fn table_entries(&self, v: Vertex) -> usize {
        self.tables[v].paths.len()
    }

    fn table_words(&self, v: Vertex) -> usize {
        self.tables[v].paths.values().map(|p| 1 + p.len()).sum()
    }

    fn label_words(&self, v: Vertex) -> usize {
        1 + self.labels[v].levels.iter().map(|(_, p)| 1 + p.len()).sum::<usize>()
    }
}
