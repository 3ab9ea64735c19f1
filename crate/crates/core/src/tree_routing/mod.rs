//! Fixed-port routing inside one rooted tree.
//!
//! Vertices get DFS intervals (children visited in ascending port order) and
//! a heavy-path decomposition. A local record holds the vertex's interval,
//! its parent port and its heavy child; a label holds the destination's
//! interval plus one `(ancestor, port)` pair per light edge on its root path.
//! The next port is a function of one record and one label.

mod double;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Port, Vertex, WeightedGraph};
use crate::hierarchy::RootedTree;

pub use double::{DoubleRecord, DoubleTreeError, DoubleTreeScheme, InPart};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree edge {from} -> {to} is not an arc of the graph")]
    NotATree { from: Vertex, to: Vertex },
    #[error("label claims a light edge below dfs {dfs_in} that the local record does not cover")]
    NotInSubtreeRecord { dfs_in: usize },
    #[error("no upward port at dfs {dfs_in}")]
    NoUpwardPort { dfs_in: usize },
}

/// What a vertex stores about itself for one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRecord {
    pub dfs_in: usize,
    pub dfs_out: usize,
    /// Port toward the parent; `None` at the root (and in out-trees of
    /// digraphs, where the reverse arc may not exist).
    pub parent_port: Option<Port>,
    /// `(port, dfs_in, dfs_out)` of the heavy child.
    pub heavy: Option<(Port, usize, usize)>,
}

impl LocalRecord {
    pub fn words(&self) -> usize {
        2 + 1 + if self.heavy.is_some() { 3 } else { 0 }
    }

    pub fn is_root(&self) -> bool {
        self.dfs_in == 0
    }
}

/// Destination label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLabel {
    pub dfs_in: usize,
    pub dfs_out: usize,
    /// `(ancestor dfs_in, port at the ancestor)` for every light edge on the
    /// root path, top-down.
    pub light: Vec<(usize, Port)>,
}

impl TreeLabel {
    pub fn words(&self) -> usize {
        2 + 2 * self.light.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hop {
    Deliver,
    Port(Port),
}

/// Next hop from the holder of `record` toward the holder of `dest`.
pub fn next_port(record: &LocalRecord, dest: &TreeLabel) -> Result<Hop, TreeError> {
    if record.dfs_in == dest.dfs_in {
        return Ok(Hop::Deliver);
    }
    if dest.dfs_in < record.dfs_in || dest.dfs_in > record.dfs_out {
        return toward_root(record);
    }
    if let Some((port, lo, hi)) = record.heavy {
        if lo <= dest.dfs_in && dest.dfs_in <= hi {
            return Ok(Hop::Port(port));
        }
    }
    dest.light
        .iter()
        .find(|&&(anc, _)| anc == record.dfs_in)
        .map(|&(_, port)| Hop::Port(port))
        .ok_or(TreeError::NotInSubtreeRecord { dfs_in: record.dfs_in })
}

/// Next hop toward the root; no label needed.
pub fn toward_root(record: &LocalRecord) -> Result<Hop, TreeError> {
    if record.is_root() {
        return Ok(Hop::Deliver);
    }
    record.parent_port.map(Hop::Port).ok_or(TreeError::NoUpwardPort { dfs_in: record.dfs_in })
}

/// Records and labels for every vertex of one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeScheme {
    pub root: Vertex,
    pub records: BTreeMap<Vertex, LocalRecord>,
    pub labels: BTreeMap<Vertex, TreeLabel>,
}

impl TreeScheme {
    /// Builds the scheme for a tree whose downward edges are arcs of `g`.
    /// Parent ports are filled in where the upward arc exists. Directed
    /// in-trees are routed with [`DoubleTreeScheme`] instead.
    pub fn build(g: &WeightedGraph, tree: &RootedTree) -> Result<Self, TreeError> {
        let mut children: BTreeMap<Vertex, Vec<(Port, Vertex)>> = BTreeMap::new();
        for (&child, &parent) in &tree.parent {
            let down = g.port_to(parent, child).ok_or(TreeError::NotATree { from: parent, to: child })?;
            children.entry(parent).or_default().push((down, child));
        }
        for list in children.values_mut() {
            list.sort_unstable();
        }

        // subtree sizes, post-order
        let mut order = Vec::with_capacity(tree.len());
        let mut stack = vec![tree.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            if let Some(cs) = children.get(&v) {
                stack.extend(cs.iter().map(|&(_, c)| c));
            }
        }
        if order.len() != tree.len() {
            let stray = *tree.parent.keys().find(|v| !order.contains(v)).unwrap();
            return Err(TreeError::NotATree { from: tree.parent[&stray], to: stray });
        }
        let mut size: BTreeMap<Vertex, usize> = BTreeMap::new();
        for &v in order.iter().rev() {
            let s = 1 + children.get(&v).map_or(0, |cs| cs.iter().map(|(_, c)| size[c]).sum());
            size.insert(v, s);
        }
        let heavy_of = |v: Vertex| -> Option<(Port, Vertex)> {
            children.get(&v)?.iter().copied().max_by(|a, b| size[&a.1].cmp(&size[&b.1]).then(b.1.cmp(&a.1)))
        };

        // preorder intervals
        let mut dfs_in = BTreeMap::new();
        let mut next = 0;
        let mut stack = vec![tree.root];
        while let Some(v) = stack.pop() {
            dfs_in.insert(v, next);
            next += 1;
            if let Some(cs) = children.get(&v) {
                stack.extend(cs.iter().rev().map(|&(_, c)| c));
            }
        }
        let dfs_out = |v: Vertex| dfs_in[&v] + size[&v] - 1;

        let mut records = BTreeMap::new();
        let mut labels = BTreeMap::new();
        let mut stack: Vec<(Vertex, Vec<(usize, Port)>)> = vec![(tree.root, Vec::new())];
        while let Some((v, light)) = stack.pop() {
            let heavy = heavy_of(v);
            let parent_port = tree.parent.get(&v).and_then(|&p| g.port_to(v, p));
            records.insert(
                v,
                LocalRecord {
                    dfs_in: dfs_in[&v],
                    dfs_out: dfs_out(v),
                    parent_port,
                    heavy: heavy.map(|(port, c)| (port, dfs_in[&c], dfs_out(c))),
                },
            );
            if let Some(cs) = children.get(&v) {
                for &(port, c) in cs {
                    let mut l = light.clone();
                    if Some((port, c)) != heavy {
                        l.push((dfs_in[&v], port));
                    }
                    stack.push((c, l));
                }
            }
            labels.insert(v, TreeLabel { dfs_in: dfs_in[&v], dfs_out: dfs_out(v), light });
        }
        Ok(Self { root: tree.root, records, labels })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, v: Vertex) -> Option<&LocalRecord> {
        self.records.get(&v)
    }

    pub fn label(&self, v: Vertex) -> Option<&TreeLabel> {
        self.labels.get(&v)
    }

    pub fn max_light_edges(&self) -> usize {
        self.labels.values().map(|l| l.light.len()).max().unwrap_or(0)
    }
}
