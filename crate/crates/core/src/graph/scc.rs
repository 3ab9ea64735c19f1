use super::{Vertex, WeightedGraph};

/// Strongly connected components (Tarjan, iterative). Components are listed
/// in reverse topological order of the condensation.
pub fn strongly_connected_components(g: &WeightedGraph) -> Vec<Vec<Vertex>> {
    let n = g.n();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next arc to scan)
        let mut call = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if let Some(a) = g.arcs(v).get(*i) {
                *i += 1;
                let w = a.to;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

pub fn is_strongly_connected(g: &WeightedGraph) -> bool {
    g.n() <= 1 || strongly_connected_components(g).len() == 1
}

/// Connectivity of an undirected graph (strong connectivity for digraphs).
pub fn is_connected(g: &WeightedGraph) -> bool {
    if g.is_directed() {
        return is_strongly_connected(g);
    }
    let n = g.n();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut todo = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = todo.pop() {
        for a in g.arcs(v) {
            if !seen[a.to] {
                seen[a.to] = true;
                count += 1;
                todo.push(a.to);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_components() {
        let g = WeightedGraph::from_edges(5, true, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1), (4, 3, 1)])
            .unwrap();
        let mut comps = strongly_connected_components(&g);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!is_strongly_connected(&g));
    }

    #[test]
    fn cycle_is_strongly_connected() {
        let g = WeightedGraph::from_edges(3, true, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert!(is_strongly_connected(&g));
    }
}
