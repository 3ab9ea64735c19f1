//! `(2k-1)`-stretch roundtrip routing for undirected graphs.
//!
//! `RT(u)` holds u's record in the cluster tree of every center in `B(u)`.
//! `L(v)` holds, per level, the pivot `p_i(v)` and v's label in the pivot's
//! cluster tree. The source picks the first level whose pivot it has a
//! table entry for and the message follows that tree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_sizes, cluster_trees, PreprocessError};
use crate::graph::{Vertex, WeightedGraph};
use crate::hierarchy::Hierarchy;
use crate::sim::{Decision, LocalView, RoutingScheme, SchemeError, Step, TreeRef};
use crate::tree_routing::{next_port, Hop, LocalRecord, TreeLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterEntry {
    /// Level `i` with the center in `A_i \ A_{i+1}`.
    pub level: usize,
    pub record: LocalRecord,
    pub label: TreeLabel,
}

impl CenterEntry {
    pub fn words(&self) -> usize {
        1 + self.record.words() + self.label.words()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RtTable {
    /// Keyed by cluster center.
    pub centers: BTreeMap<Vertex, CenterEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RtLabel {
    pub id: Vertex,
    /// `(p_i(v), label of v in T(C(p_i(v))))` for `i < k`.
    pub levels: Vec<(Vertex, TreeLabel)>,
}

impl RtLabel {
    pub fn words(&self) -> usize {
        1 + self.levels.iter().map(|(_, l)| 1 + l.words()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RtHeader {
    pub tree: Vertex,
    pub dest: TreeLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UndirectedRtScheme {
    pub graph: WeightedGraph,
    pub hierarchy: Hierarchy,
    pub tables: Vec<RtTable>,
    pub labels: Vec<RtLabel>,
}

impl UndirectedRtScheme {
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
                        .ok_or_else(|| PreprocessError::Invariant(format!("{u} is in B({c}) but not in T(C({c}))")))?;
                    centers.insert(c, CenterEntry { level, record: record.clone(), label: label.clone() });
                }
            }
            tables.push(RtTable { centers });
            let levels = h.pivots[u]
                .iter()
                .map(|&p| {
                    trees[p].label(u).cloned().map(|l| (p, l)).ok_or_else(|| {
                        PreprocessError::Invariant(format!("{u} missing from the cluster tree of its pivot {p}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            labels.push(RtLabel { id: u, levels });
        }
        Ok(Self { graph, hierarchy, tables, labels })
    }

    /// `min{i : p_i(v) ∈ B(u)}`, as the source computes it.
    pub fn select_level(table: &RtTable, dest: &RtLabel) -> Option<usize> {
        dest.levels.iter().position(|(p, _)| table.centers.contains_key(p))
    }
}

impl RoutingScheme for UndirectedRtScheme {
    type Table = RtTable;
    type Label = RtLabel;
    type Header = RtHeader;

    fn tag(&self) -> &'static str {
        "undirected-rt"
    }

    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    fn table(&self, v: Vertex) -> &RtTable {
        &self.tables[v]
    }

    fn label(&self, v: Vertex) -> &RtLabel {
        &self.labels[v]
    }

    fn step(
        view: &mut LocalView<'_, RtTable, RtLabel>,
        header: Option<RtHeader>,
    ) -> Result<Step<RtHeader>, SchemeError> {
        let me = view.label().id;
        let table = view.table();
        let header = match header {
            Some(h) => h,
            None => {
                let dest = view.dest_label();
                if dest.id == me {
                    return Ok(Step::Deliver);
                }
                let level = Self::select_level(table, dest)
                    .ok_or_else(|| SchemeError::Invariant(format!("no pivot of {} in B({me})", dest.id)))?;
                let (tree, label) = &dest.levels[level];
                view.log(Decision::Level { level });
                view.log(Decision::Tree { tree: TreeRef::Cluster(*tree) });
                RtHeader { tree: *tree, dest: label.clone() }
            }
        };
        let entry =
            table.centers.get(&header.tree).ok_or(SchemeError::MissingTreeRecord { vertex: me, tree: header.tree })?;
        match next_port(&entry.record, &header.dest)? {
            Hop::Deliver => Ok(Step::Deliver),
            Hop::Port(port) => Ok(Step::Forward { port, header }),
        }
    }

    fn header_words(h: &RtHeader) -> usize {
        1 + h.dest.words()
    }

    fn table_entries(&self, v: Vertex) -> usize {
        self.tables[v].centers.len()
    }

    fn table_words(&self, v: Vertex) -> usize {
        self.tables[v].centers.values().map(|e| 1 + e.words()).sum()
    }

    fn label_words(&self, v: Vertex) -> usize {
        self.labels[v].words()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, DistanceOracle, GeneratorConfig, GraphKind};
    use crate::hierarchy::{build_hierarchy, HierarchyConfig};
    use crate::sim::run_route;

    fn scheme(n: usize, k: usize, seed: u64) -> UndirectedRtScheme {
        let g = generate(&GeneratorConfig::new(GraphKind::ErdosRenyi, n, 0.15, seed)).unwrap();
        let h = build_hierarchy(&g, HierarchyConfig::new(k, seed)).unwrap();
        UndirectedRtScheme::preprocess(g, h).unwrap()
    }

    #[test]
    fn same_vertex_delivers_immediately() {
        let s = scheme(20, 2, 1);
        let t = run_route(&s, 4, 4, 100).unwrap();
        assert_eq!(t.hops(), 0);
    }

    #[test]
    fn k_one_is_exact() {
        let s = scheme(25, 1, 3);
        let o = DistanceOracle::new(&s.graph);
        for u in 0..25 {
            assert_eq!(s.tables[u].centers.len(), 25);
            for v in 0..25 {
                assert_eq!(run_route(&s, u, v, 1000).unwrap().length, o.d(u, v));
            }
        }
    }

    #[test]
    fn sizes_match_bunches() {
        let s = scheme(40, 3, 2);
        for u in 0..40 {
            assert_eq!(s.tables[u].centers.len(), s.hierarchy.bunch_size(u));
            assert_eq!(s.labels[u].levels.len(), 3);
        }
    }

    #[test]
    fn directed_input_rejected() {
        let g = WeightedGraph::from_edges(2, true, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        let h = build_hierarchy(&g, HierarchyConfig::new(1, 0)).unwrap();
        assert_eq!(UndirectedRtScheme::preprocess(g, h), Err(PreprocessError::DirectedInput));
    }
}
