use crate::graph::Graph;
use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

/// Hop distances from `src` along out-edges, or along in-edges when `reverse`.
pub fn bfs(g: &Graph, src: usize, reverse: bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes are reached") + 1;
        let step = |u: usize, dist: &mut Vec<Option<usize>>, queue: &mut VecDeque<usize>| {
            if dist[u].is_none() {
                dist[u] = Some(d);
                queue.push_back(u);
            }
        };
        if reverse {
            for (u, _) in g.in_neighbors(v) {
                step(u, &mut dist, &mut queue);
            }
        } else {
            for (u, _) in g.out_neighbors(v) {
                step(u, &mut dist, &mut queue);
            }
        }
    }
    dist
}

/// Hop distances ignoring edge direction, cut off at `max_hops`.
pub fn weak_ball(g: &Graph, center: usize, max_hops: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[center] = 0;
    let mut queue = VecDeque::from([center]);
    let mut members = vec![center];
    while let Some(v) = queue.pop_front() {
        if dist[v] == max_hops {
            continue;
        }
        for u in g.out_neighbors(v).chain(g.in_neighbors(v)).map(|(u, _)| u) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                members.push(u);
                queue.push_back(u);
            }
        }
    }
    members.sort_unstable();
    members
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted single-source distances (`INFINITY` when unreachable) and the
/// predecessor each node was first reached through. Requires nonnegative weights.
pub fn dijkstra(g: &Graph, src: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::from([Reverse(Key(0.0, src))]);
    while let Some(Reverse(Key(d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for (u, w) in g.out_neighbors(v) {
            let nd = d + w;
            if !done[u] && nd < dist[u] {
                dist[u] = nd;
                pred[u] = Some(v);
                heap.push(Reverse(Key(nd, u)));
            }
        }
    }
    (dist, pred)
}

/// Walks predecessors back from `target`; `None` when unreachable.
pub fn path_to(pred: &[Option<usize>], src: usize, target: usize) -> Option<Vec<usize>> {
    let mut path = vec![target];
    let mut v = target;
    while v != src {
        v = pred[v]?;
        path.push(v);
    }
    path.reverse();
    Some(path)
}

/// Row-major hop-distance matrix; unreachable pairs are `INFINITY`.
pub fn all_pairs_hops(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        out.extend(bfs(g, s, false).into_iter().map(|d| d.map_or(f64::INFINITY, |d| d as f64)));
    }
    out
}

/// Row-major weighted distance matrix, one Dijkstra per source.
pub fn all_pairs_weighted(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        out.extend(dijkstra(g, s).0);
    }
    out
}

pub fn has_negative_weight(g: &Graph) -> bool {
    g.edges().iter().any(|e| e.weight < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The weighted directed five-node routing example.
    fn routing() -> Graph {
        Graph::new(
            5,
            true,
            [(0, 2, 3.0), (0, 3, 7.0), (1, 0, 2.0), (1, 4, 8.0), (2, 4, 1.0), (3, 4, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn dijkstra_routing_example() {
        let (dist, pred) = dijkstra(&routing(), 1);
        assert_eq!(dist[4], 6.0);
        assert_eq!(path_to(&pred, 1, 4).unwrap(), vec![1, 0, 2, 4]);
        assert!(path_to(&pred, 4, 1).is_none() || dist[1] == 0.0);
    }

    #[test]
    fn unreachable_is_infinite() {
        let (dist, pred) = dijkstra(&routing(), 4);
        assert!(dist[0].is_infinite());
        assert!(path_to(&pred, 4, 0).is_none());
    }

    #[test]
    fn bfs_directions() {
        let g = routing();
        assert_eq!(bfs(&g, 1, false)[4], Some(1));
        assert_eq!(bfs(&g, 4, true)[1], Some(1));
        assert_eq!(bfs(&g, 4, false)[1], None);
    }

    #[test]
    fn weak_ball_radius() {
        let g = Graph::new(5, true, [(0, 1, 1.0), (2, 1, 1.0), (3, 2, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(weak_ball(&g, 1, 0), vec![1]);
        assert_eq!(weak_ball(&g, 1, 1), vec![0, 1, 2]);
        assert_eq!(weak_ball(&g, 1, 3), vec![0, 1, 2, 3, 4]);
    }
}
