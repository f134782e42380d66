use super::{undirected_adjacency, weak_components};
use crate::graph::Graph;
use std::collections::VecDeque;

/// Exact cycle existence: a directed cycle, or (undirected) any cycle at all.
pub fn has_cycle(g: &Graph) -> bool {
    if g.is_directed() {
        find_directed_cycle(g).is_some()
    } else {
        g.edge_count() + weak_components(g).len() > g.node_count()
    }
}

/// Some directed cycle as a node list, found by colored DFS.
pub fn find_directed_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.node_count();
    let succ: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v).map(|(u, _)| u).collect()).collect();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut call = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        parent[w] = v;
                        call.push((w, 0));
                    }
                    1 => {
                        let mut cycle = vec![v];
                        let mut x = v;
                        while x != w {
                            x = parent[x];
                            cycle.push(x);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                call.pop();
            }
        }
    }
    None
}

/// Simple cycles, each reported starting at its smallest node. Undirected
/// cycles have length >= 3 and appear once. Enumeration stops after
/// `max_cycles` cycles or `budget` DFS expansions; the flag reports truncation.
pub fn simple_cycles(g: &Graph, max_cycles: usize, budget: usize) -> (Vec<Vec<usize>>, bool) {
    let n = g.node_count();
    let succ: Vec<Vec<usize>> = if g.is_directed() {
        (0..n).map(|v| g.out_neighbors(v).map(|(u, _)| u).collect()).collect()
    } else {
        undirected_adjacency(g)
    };
    let directed = g.is_directed();
    let mut cycles = Vec::new();
    let mut steps = 0usize;
    let mut on_path = vec![false; n];
    for s in 0..n {
        let mut path = vec![s];
        on_path[s] = true;
        let mut next = vec![0usize];
        while let Some(i) = next.last_mut() {
            let v = *path.last().expect("path tracks next");
            if *i >= succ[v].len() {
                next.pop();
                on_path[v] = false;
                path.pop();
                continue;
            }
            let w = succ[v][*i];
            *i += 1;
            steps += 1;
            if steps > budget {
                on_path.iter_mut().for_each(|x| *x = false);
                return (cycles, true);
            }
            if w == s {
                let closes = if directed {
                    true
                } else {
                    path.len() >= 3 && path[1] < v
                };
                if closes {
                    cycles.push(path.clone());
                    if cycles.len() >= max_cycles {
                        return (cycles, true);
                    }
                }
            } else if w > s && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                next.push(0);
            }
        }
    }
    (cycles, false)
}

/// Fundamental cycles of a BFS spanning forest of the undirected view.
pub fn cycle_basis(g: &Graph) -> Vec<Vec<usize>> {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut basis = Vec::new();
    for (v, nbrs) in adj.iter().enumerate() {
        for &u in nbrs {
            if v < u && parent[u] != v && parent[v] != u {
                let (mut a, mut b) = (v, u);
                let (mut left, mut right) = (vec![a], vec![b]);
                while a != b {
                    if depth[a] >= depth[b] {
                        a = parent[a];
                        left.push(a);
                    } else {
                        b = parent[b];
                        right.push(b);
                    }
                }
                right.pop();
                right.reverse();
                left.extend(right);
                basis.push(left);
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_example_has_cycle() {
        let g = Graph::new(6, false, [(0, 1, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 4, 1.0), (2, 5, 1.0), (3, 4, 1.0), (4, 5, 1.0)])
            .unwrap();
        assert!(has_cycle(&g));
        let (cycles, truncated) = simple_cycles(&g, 100, 1_000_000);
        assert!(!truncated);
        // Cyclomatic number 2 ⇒ three simple cycles (two faces plus their sum).
        assert_eq!(cycles.len(), 3);
        assert_eq!(cycle_basis(&g).len(), 2);
    }

    #[test]
    fn dag_has_no_cycle() {
        let g = Graph::new(4, true, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!has_cycle(&g));
        assert!(simple_cycles(&g, 10, 1000).0.is_empty());
    }

    #[test]
    fn directed_two_cycle_and_triangle() {
        let g = Graph::new(3, true, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let cyc = find_directed_cycle(&g).unwrap();
        assert!(cyc.len() >= 2);
        let (all, _) = simple_cycles(&g, 10, 1000);
        assert_eq!(all, vec![vec![0, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn basis_cycles_are_closed_walks() {
        let g = Graph::new(5, false, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 2, 1.0)]).unwrap();
        for c in cycle_basis(&g) {
            for i in 0..c.len() {
                assert!(g.edge_weight(c[i], c[(i + 1) % c.len()]).is_some(), "{c:?}");
            }
        }
    }
}
