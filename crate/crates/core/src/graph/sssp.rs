use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Length, Port, Vertex, WeightedGraph, INFINITE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Distances from the source.
    Forward,
    /// Distances to the source, along reversed arcs.
    Reverse,
}

/// Single-source shortest paths with a deterministic predecessor tree.
///
/// For [`Direction::Forward`], `parent[v]` precedes `v` on the path from the
/// source and `parent_port[v]` is the port at `parent[v]` of the arc into `v`.
/// For [`Direction::Reverse`], `parent[v]` follows `v` on the path to the
/// source and `parent_port[v]` is the port at `v` of the arc out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsspResult {
    pub source: Vertex,
    pub direction: Direction,
    pub dist: Vec<Length>,
    pub parent: Vec<Option<Vertex>>,
    pub parent_port: Vec<Option<Port>>,
}

impl SsspResult {
    pub fn reachable(&self, v: Vertex) -> bool {
        self.dist[v] != INFINITE
    }

    /// Tree path between the source and `v`, listed from the source outward.
    /// In the reverse direction the walk `v -> ... -> source` is the path
    /// read backwards.
    pub fn tree_path(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Number of tree edges between the source and `v`.
    pub fn hops(&self, v: Vertex) -> Option<usize> {
        self.tree_path(v).map(|p| p.len() - 1)
    }

    /// Ports traversed by a message following the shortest path. Forward:
    /// source to `v`; reverse: `v` to the source.
    pub fn port_path(&self, v: Vertex) -> Option<Vec<Port>> {
        let path = self.tree_path(v)?;
        let ports = match self.direction {
            // parent_port of each non-source vertex, outward from the source
            Direction::Forward => path[1..].iter().map(|&x| self.parent_port[x].unwrap()).collect(),
            // walk from v inward: each vertex's own port toward its parent
            Direction::Reverse => path[1..].iter().rev().map(|&x| self.parent_port[x].unwrap()).collect(),
        };
        Some(ports)
    }
}

/// Dijkstra with ties broken on `(distance, predecessor id)`.
pub fn dijkstra(g: &WeightedGraph, source: Vertex, direction: Direction) -> SsspResult {
    let n = g.n();
    let mut dist = vec![INFINITE; n];
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    let mut parent_port: Vec<Option<Port>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0, source)));

    let mut relax = |u: Vertex,
                     v: Vertex,
                     w: Length,
                     port: Port,
                     dist: &mut Vec<Length>,
                     heap: &mut BinaryHeap<Reverse<(Length, Vertex)>>| {
        let nd = dist[u] + w;
        let better = nd < dist[v] || (nd == dist[v] && parent[v].is_none_or(|p| u < p));
        if better {
            if nd < dist[v] {
                heap.push(Reverse((nd, v)));
            }
            dist[v] = nd;
            parent[v] = Some(u);
            parent_port[v] = Some(port);
        }
    };

    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        match direction {
            Direction::Forward => {
                for (port, a) in g.arcs(u).iter().enumerate() {
                    if !done[a.to] {
                        relax(u, a.to, a.weight, port, &mut dist, &mut heap);
                    }
                }
            }
            Direction::Reverse => {
                for r in &g.transposed()[u] {
                    if !done[r.from] {
                        relax(u, r.from, r.weight, r.port, &mut dist, &mut heap);
                    }
                }
            }
        }
    }

    SsspResult { source, direction, dist, parent, parent_port }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_is_at_distance_zero() {
        let g = WeightedGraph::from_edges(3, false, &[(0, 1, 5), (1, 2, 7)]).unwrap();
        for s in 0..3 {
            assert_eq!(dijkstra(&g, s, Direction::Forward).dist[s], 0);
        }
    }

    #[test]
    fn path_graph() {
        let g = WeightedGraph::from_edges(3, false, &[(0, 1, 5), (1, 2, 7)]).unwrap();
        let r = dijkstra(&g, 0, Direction::Forward);
        assert_eq!(r.dist[2], 12);
        assert_eq!(r.parent[2], Some(1));
        assert_eq!(r.tree_path(2), Some(vec![0, 1, 2]));
    }

    #[test]
    fn triangle_prefers_two_hop_route() {
        let g = WeightedGraph::from_edges(3, false, &[(0, 1, 1), (1, 2, 1), (0, 2, 3)]).unwrap();
        let r = dijkstra(&g, 0, Direction::Forward);
        assert_eq!(r.dist[2], 2);
        assert_eq!(r.parent[2], Some(1));
    }

    #[test]
    fn ties_go_to_smaller_predecessor() {
        // two equal paths 0-1-3 and 0-2-3
        let g = WeightedGraph::from_edges(4, false, &[(0, 2, 1), (2, 3, 1), (0, 1, 1), (1, 3, 1)]).unwrap();
        let r = dijkstra(&g, 0, Direction::Forward);
        assert_eq!(r.parent[3], Some(1));
        let r = dijkstra(&g, 3, Direction::Forward);
        assert_eq!(r.parent[0], Some(1));
    }

    #[test]
    fn reverse_direction_measures_distance_to_source() {
        let g = WeightedGraph::from_edges(3, true, &[(0, 1, 2), (1, 2, 3), (2, 0, 10)]).unwrap();
        let r = dijkstra(&g, 2, Direction::Reverse);
        assert_eq!(r.dist, vec![5, 3, 0]);
        assert_eq!(r.parent[0], Some(1));
        // port at 0 of arc 0->1
        assert_eq!(r.parent_port[0], Some(0));
        assert_eq!(r.port_path(0), Some(vec![0, 0]));
        let f = dijkstra(&g, 0, Direction::Forward);
        assert_eq!(f.port_path(2), Some(vec![0, 0]));
    }

    #[test]
    fn unreachable_vertices_are_infinite() {
        let g = WeightedGraph::from_edges(3, true, &[(0, 1, 2)]).unwrap();
        let r = dijkstra(&g, 1, Direction::Forward);
        assert_eq!(r.dist[0], INFINITE);
        assert_eq!(r.tree_path(0), None);
    }
}
