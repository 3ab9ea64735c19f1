use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LocalRecord, TreeError, TreeLabel, TreeScheme};
use crate::graph::{Port, Vertex, WeightedGraph};
use crate::hierarchy::{extract_double_tree, HierarchyError, RootedTree};

/// A vertex's place in the in-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InPart {
    Root,
    /// Port of the arc toward the root.
    Successor(Port),
    Absent,
}

/// What a vertex stores about itself for one double tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleRecord {
    /// Record in the out-tree, without parent ports.
    pub out: Option<LocalRecord>,
    pub up: InPart,
}

impl DoubleRecord {
    pub fn words(&self) -> usize {
        1 + self.out.as_ref().map_or(0, LocalRecord::words)
    }
}

/// Out-tree routing by labels plus successor ports toward the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleTreeScheme {
    pub root: Vertex,
    pub out_part: TreeScheme,
    pub in_part: BTreeMap<Vertex, Option<Port>>,
}

impl DoubleTreeScheme {
    pub fn build(g: &WeightedGraph, root: Vertex, members: &[Vertex]) -> Result<Self, DoubleTreeError> {
        let (out, inn) = extract_double_tree(g, root, members)?;
        Ok(Self::from_trees(g, &out, &inn)?)
    }

    pub fn from_trees(g: &WeightedGraph, out: &RootedTree, inn: &RootedTree) -> Result<Self, TreeError> {
        let mut out_part = TreeScheme::build(g, out)?;
        for r in out_part.records.values_mut() {
            r.parent_port = None;
        }
        let mut in_part = BTreeMap::new();
        in_part.insert(inn.root, None);
        for (&child, &parent) in &inn.parent {
            let port = g.port_to(child, parent).ok_or(TreeError::NotATree { from: child, to: parent })?;
            in_part.insert(child, Some(port));
        }
        Ok(Self { root: out.root, out_part, in_part })
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.out_part.records.contains_key(&v) || self.in_part.contains_key(&v)
    }

    /// Every vertex of either part, ascending.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.out_part.records.keys().chain(self.in_part.keys()).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn record(&self, v: Vertex) -> Option<DoubleRecord> {
        if !self.contains(v) {
            return None;
        }
        let up = match self.in_part.get(&v) {
            Some(None) => InPart::Root,
            Some(Some(p)) => InPart::Successor(*p),
            None => InPart::Absent,
        };
        Some(DoubleRecord { out: self.out_part.records.get(&v).cloned(), up })
    }

    /// Label of `v` in the out-tree.
    pub fn out_label(&self, v: Vertex) -> Option<&TreeLabel> {
        self.out_part.label(v)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DoubleTreeError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}
