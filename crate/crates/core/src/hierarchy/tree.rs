use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HierarchyError;
use crate::graph::{dijkstra, Direction, SsspResult, Vertex, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Edges point away from the root.
    Out,
    /// Edges point toward the root.
    In,
}

/// A shortest-path tree restricted to the paths that serve a member set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedTree {
    pub root: Vertex,
    pub orientation: Orientation,
    /// `child -> parent`. The root has no entry.
    pub parent: BTreeMap<Vertex, Vertex>,
}

impl RootedTree {
    pub fn singleton(root: Vertex, orientation: Orientation) -> Self {
        Self { root, orientation, parent: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    /// Root first, then the remaining vertices in ascending order.
    pub fn vertices(&self) -> Vec<Vertex> {
        std::iter::once(self.root).chain(self.parent.keys().copied()).collect()
    }

    /// Tree path from the root to `v`.
    pub fn path_from_root(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.contains(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(&p) = self.parent.get(&cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Builds the tree from an SSSP result rooted at `root`.
    pub fn from_sssp(sssp: &SsspResult, members: impl IntoIterator<Item = Vertex>) -> Result<Self, HierarchyError> {
        let orientation = match sssp.direction {
            Direction::Forward => Orientation::Out,
            Direction::Reverse => Orientation::In,
        };
        let mut tree = Self::singleton(sssp.source, orientation);
        for m in members {
            if !sssp.reachable(m) {
                return Err(HierarchyError::MemberUnreachable(m));
            }
            let mut cur = m;
            while let Some(p) = sssp.parent[cur] {
                if tree.parent.insert(cur, p).is_some() {
                    break;
                }
                cur = p;
            }
        }
        Ok(tree)
    }
}

/// Union of the tree paths `root → s` (out) or `s → root` (in) for `s` in
/// `members`, under the deterministic SSSP trees.
pub fn extract_tree(
    g: &WeightedGraph,
    root: Vertex,
    members: &[Vertex],
    orientation: Orientation,
) -> Result<RootedTree, HierarchyError> {
    let direction = match orientation {
        Orientation::Out => Direction::Forward,
        Orientation::In => Direction::Reverse,
    };
    RootedTree::from_sssp(&dijkstra(g, root, direction), members.iter().copied())
}

/// `(T_out, T_in)`; together they form the double tree.
pub fn extract_double_tree(
    g: &WeightedGraph,
    root: Vertex,
    members: &[Vertex],
) -> Result<(RootedTree, RootedTree), HierarchyError> {
    Ok((extract_tree(g, root, members, Orientation::Out)?, extract_tree(g, root, members, Orientation::In)?))
}
