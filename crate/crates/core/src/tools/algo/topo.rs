//! Topological orders of directed graphs. Callers reject undirected input.

use crate::graph::Graph;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

fn in_degrees(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|v| g.in_degree(v)).collect()
}

/// Lexicographically smallest topological order, or `None` if cyclic.
pub fn topological_sort(g: &Graph) -> Option<Vec<usize>> {
    let mut indeg = in_degrees(g);
    let mut heap: BinaryHeap<Reverse<usize>> = (0..g.node_count())
        .filter(|&v| indeg[v] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(g.node_count());
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for (u, _) in g.out_neighbors(v) {
            indeg[u] -= 1;
            if indeg[u] == 0 {
                heap.push(Reverse(u));
            }
        }
    }
    (order.len() == g.node_count()).then_some(order)
}

/// Layers of nodes whose predecessors all lie in earlier layers, or `None` if cyclic.
pub fn generations(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let mut indeg = in_degrees(g);
    let mut layer: Vec<usize> = (0..g.node_count()).filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::new();
    let mut seen = 0;
    while !layer.is_empty() {
        seen += layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for (u, _) in g.out_neighbors(v) {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    next.push(u);
                }
            }
        }
        next.sort_unstable();
        out.push(std::mem::take(&mut layer));
        layer = next;
    }
    (seen == g.node_count()).then_some(out)
}

/// Topological orders in lexicographic order, at most `limit` of them.
/// Returns `None` if cyclic; the flag reports truncation.
pub fn all_topological_sorts(g: &Graph, limit: usize) -> Option<(Vec<Vec<usize>>, bool)> {
    topological_sort(g)?;
    let n = g.node_count();
    let mut indeg = in_degrees(g);
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut out = Vec::new();
    let truncated = extend(g, &mut indeg, &mut used, &mut order, &mut out, limit);
    Some((out, truncated))
}

fn extend(
    g: &Graph,
    indeg: &mut [usize],
    used: &mut [bool],
    order: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) -> bool {
    if order.len() == g.node_count() {
        if out.len() == limit {
            return true;
        }
        out.push(order.clone());
        return false;
    }
    for v in 0..g.node_count() {
        if used[v] || indeg[v] != 0 {
            continue;
        }
        used[v] = true;
        order.push(v);
        for (u, _) in g.out_neighbors(v) {
            indeg[u] -= 1;
        }
        let stop = extend(g, indeg, used, order, out, limit);
        for (u, _) in g.out_neighbors(v) {
            indeg[u] += 1;
        }
        order.pop();
        used[v] = false;
        if stop {
            return true;
        }
    }
    false
}

/// True iff every edge points forward in `order` and `order` is a permutation.
pub fn is_valid_order(g: &Graph, order: &[usize]) -> bool {
    let n = g.node_count();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    g.edges().iter().all(|e| pos[e.src] < pos[e.dst])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Graph {
        Graph::new(4, true, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn diamond_orders() {
        let g = diamond();
        assert_eq!(topological_sort(&g).unwrap(), vec![0, 1, 2, 3]);
        let (all, truncated) = all_topological_sorts(&g, 10).unwrap();
        assert_eq!(all, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        assert!(!truncated);
        assert_eq!(generations(&g).unwrap(), vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn cycle_is_rejected() {
        let g = Graph::new(3, true, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(topological_sort(&g).is_none());
        assert!(generations(&g).is_none());
        assert!(all_topological_sorts(&g, 5).is_none());
    }

    #[test]
    fn truncation_flag() {
        let g = Graph::new(4, true, []).unwrap();
        let (all, truncated) = all_topological_sorts(&g, 5).unwrap();
        assert_eq!(all.len(), 5);
        assert!(truncated);
        assert!(all.iter().all(|o| is_valid_order(&g, o)));
    }
}
