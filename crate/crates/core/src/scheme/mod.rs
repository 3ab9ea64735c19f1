//! Routing schemes: preprocessing into per-vertex tables and labels, and the
//! per-hop step functions the simulator runs.

pub mod average;
pub mod directed7;
pub mod directed_hop;
mod state;
pub mod undirected_rt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{dijkstra, Direction, WeightedGraph};
use crate::hierarchy::{Hierarchy, HierarchyError, RootedTree};
use crate::tree_routing::{TreeError, TreeScheme};

pub use average::{c_sequence, c_sequence_f64, stretch_bound, stretch_bound_f64, AverageOracleScheme, AverageScheme};
pub use directed7::Directed7Scheme;
pub use directed_hop::DirectedHopScheme;
pub use state::{SchemeKind, SchemeState, StateError, StateMeta, STATE_FORMAT};
pub use undirected_rt::UndirectedRtScheme;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("this scheme needs an undirected graph")]
    DirectedInput,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("this scheme needs k = {expected}, got {got}")]
    WrongK { expected: usize, got: usize },
    #[error("hierarchy was built for a graph on {hierarchy} vertices, graph has {graph}")]
    SizeMismatch { hierarchy: usize, graph: usize },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn check_sizes(g: &WeightedGraph, h: &Hierarchy) -> Result<(), PreprocessError> {
    if g.n() != h.n {
        return Err(PreprocessError::SizeMismatch { hierarchy: h.n, graph: g.n() });
    }
    Ok(())
}

/// `T(C(w))` for every vertex `w` of an undirected graph, as one shortest
/// path tree from `w` restricted to the paths serving its cluster.
fn cluster_trees(g: &WeightedGraph, h: &Hierarchy) -> Result<Vec<TreeScheme>, PreprocessError> {
    (0..g.n())
        .into_par_iter()
        .map(|w| {
            let sssp = dijkstra(g, w, Direction::Forward);
            let tree = RootedTree::from_sssp(&sssp, h.clusters[w].iter().copied())?;
            Ok(TreeScheme::build(g, &tree)?)
        })
        .collect()
}
