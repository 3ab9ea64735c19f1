//! Compact roundtrip routing: hierarchies of sampled vertex sets, tree
//! routing, four routing schemes, and a simulator that runs them hop by hop
//! under a strict locality contract.

pub mod analysis;
pub mod graph;
pub mod hierarchy;
pub mod scheme;
pub mod sim;
pub mod tree_routing;
