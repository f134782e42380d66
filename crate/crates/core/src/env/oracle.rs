//! Ground-truth computations for task generation.
//!
//! Deliberately independent of `tools::algo`: plain edge-list scans, dense
//! pair-dependency sums, Bellman-Ford, and DFS augmenting paths, so a bug in
//! the toolkit cannot leak into the answers it is graded against.

use crate::graph::Graph;
use std::collections::VecDeque;

/// Adjacency from the raw edge list: `(out, in)` lists; undirected edges appear in both.
fn lists(g: &Graph) -> (Vec<Vec<(usize, f64)>>, Vec<Vec<(usize, f64)>>) {
    let n = g.node_count();
    let mut out = vec![Vec::new(); n];
    let mut inn = vec![Vec::new(); n];
    for e in g.edges() {
        out[e.src].push((e.dst, e.weight));
        inn[e.dst].push((e.src, e.weight));
        if !g.is_directed() {
            out[e.dst].push((e.src, e.weight));
            inn[e.src].push((e.dst, e.weight));
        }
    }
    (out, inn)
}

fn weak_lists(g: &Graph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for e in g.edges() {
        adj[e.src].push(e.dst);
        adj[e.dst].push(e.src);
    }
    adj
}

fn bfs_hops(adj: &[Vec<(usize, f64)>], s: usize) -> Vec<Option<usize>> {
    let mut d = vec![None; adj.len()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &(u, _) in &adj[v] {
            if d[u].is_none() {
                d[u] = Some(d[v].unwrap() + 1);
                q.push_back(u);
            }
        }
    }
    d
}

/// Betweenness from pair dependencies `σ_sv·σ_vt/σ_st`, ordered pairs, scaled by `1/((n-1)(n-2))`.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let (out, _) = lists(g);
    let mut dist = vec![vec![usize::MAX; n]; n];
    let mut sigma = vec![vec![0.0f64; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        sigma[s][s] = 1.0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &(u, _) in &out[v] {
                if dist[s][u] == usize::MAX {
                    dist[s][u] = dist[s][v] + 1;
                    q.push_back(u);
                }
                if dist[s][u] == dist[s][v] + 1 {
                    sigma[s][u] += sigma[s][v];
                }
            }
        }
    }
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            for (v, b) in bc.iter_mut().enumerate() {
                if v != s && v != t && dist[s][v] != usize::MAX && dist[v][t] != usize::MAX && dist[s][v] + dist[v][t] == dist[s][t] {
                    *b += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    if n > 2 {
        let scale = 1.0 / ((n - 1) * (n - 2)) as f64;
        bc.iter_mut().for_each(|b| *b *= scale);
    }
    bc
}

/// Incoming hop distances to every node: `dist[u][v]` = hops from `v` to `u`.
fn incoming(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let (_, inn) = lists(g);
    (0..g.node_count()).map(|u| bfs_hops(&inn, u)).collect()
}

pub fn closeness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    incoming(g)
        .into_iter()
        .map(|d| {
            let reach: Vec<usize> = d.into_iter().flatten().collect();
            let total: usize = reach.iter().sum();
            if total == 0 {
                0.0
            } else {
                let r = (reach.len() - 1) as f64;
                r / total as f64 * r / (n - 1) as f64
            }
        })
        .collect()
}

pub fn harmonic(g: &Graph) -> Vec<f64> {
    incoming(g)
        .into_iter()
        .map(|d| d.into_iter().flatten().filter(|&x| x > 0).map(|x| 1.0 / x as f64).sum())
        .collect()
}

pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut deg = vec![0.0; n];
    for e in g.edges() {
        deg[e.src] += 1.0;
        deg[e.dst] += 1.0;
    }
    if n > 1 {
        deg.iter_mut().for_each(|d| *d /= (n - 1) as f64);
    }
    deg
}

/// Bellman-Ford distances from `s` (`INFINITY` when unreachable).
pub fn weighted_distances(g: &Graph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut d = vec![f64::INFINITY; n];
    d[s] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for e in g.edges() {
            let pairs: &[(usize, usize)] = if g.is_directed() { &[(e.src, e.dst)] } else { &[(e.src, e.dst), (e.dst, e.src)] };
            for &(a, b) in pairs {
                if d[a] + e.weight < d[b] {
                    d[b] = d[a] + e.weight;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Ford-Fulkerson with DFS augmenting paths on a dense residual matrix.
pub fn max_flow(g: &Graph, s: usize, t: usize) -> f64 {
    let n = g.node_count();
    let mut cap = vec![vec![0.0f64; n]; n];
    for e in g.edges() {
        cap[e.src][e.dst] += e.weight;
        if !g.is_directed() {
            cap[e.dst][e.src] += e.weight;
        }
    }
    let mut total = 0.0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            if v == t {
                break;
            }
            for u in 0..n {
                if prev[u] == usize::MAX && cap[v][u] > 1e-12 {
                    prev[u] = v;
                    stack.push(u);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut b = f64::INFINITY;
        let mut v = t;
        while v != s {
            b = b.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= b;
            cap[v][prev[v]] += b;
            v = prev[v];
        }
        total += b;
    }
}

/// Weak component of every node, as sorted member lists indexed by node.
pub fn component_of(g: &Graph) -> Vec<Vec<usize>> {
    let adj = weak_lists(g);
    let n = adj.len();
    let mut comp: Vec<Option<usize>> = vec![None; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s].is_some() {
            continue;
        }
        let id = members.len();
        let mut block = vec![s];
        comp[s] = Some(id);
        let mut i = 0;
        while i < block.len() {
            let v = block[i];
            i += 1;
            for &u in &adj[v] {
                if comp[u].is_none() {
                    comp[u] = Some(id);
                    block.push(u);
                }
            }
        }
        block.sort_unstable();
        members.push(block);
    }
    comp.into_iter().map(|c| members[c.unwrap()].clone()).collect()
}

pub fn component_count(g: &Graph) -> usize {
    count_components(&weak_lists(g), None)
}

fn count_components(adj: &[Vec<usize>], removed: Option<usize>) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    if let Some(r) = removed {
        seen[r] = true;
    }
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}

/// Nodes whose removal increases the number of weak components.
pub fn articulation_points(g: &Graph) -> Vec<usize> {
    let adj = weak_lists(g);
    let base = count_components(&adj, None);
    (0..adj.len())
        .filter(|&v| {
            let mut nbrs = adj[v].clone();
            nbrs.sort_unstable();
            nbrs.dedup();
            // An isolated or leaf node cannot disconnect anything.
            nbrs.len() >= 2 && count_components(&adj, Some(v)) > base
        })
        .collect()
}

/// Nodes within `k` hops of `v`, ignoring direction.
pub fn weak_ball(g: &Graph, v: usize, k: usize) -> Vec<usize> {
    let adj = weak_lists(g);
    let mut d = vec![usize::MAX; adj.len()];
    d[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        if d[x] == k {
            continue;
        }
        for &u in &adj[x] {
            if d[u] == usize::MAX {
                d[u] = d[x] + 1;
                q.push_back(u);
            }
        }
    }
    (0..adj.len()).filter(|&u| d[u] != usize::MAX).collect()
}

/// Whether `v` lies on a cycle of an undirected graph: some incident edge
/// `(v, u)` whose removal leaves `u` reachable from `v`.
pub fn on_cycle_undirected(g: &Graph, v: usize) -> bool {
    let adj = weak_lists(g);
    adj[v].iter().any(|&u| {
        let mut seen = vec![false; adj.len()];
        seen[v] = true;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if (x == v && y == u) || (x == u && y == v) || seen[y] {
                    continue;
                }
                if y == u {
                    return true;
                }
                seen[y] = true;
                stack.push(y);
            }
        }
        false
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path5_middle_has_max_betweenness() {
        let g = Graph::new(5, false, (1..5).map(|i| (i - 1, i, 1.0))).unwrap();
        let bc = betweenness(&g);
        let best = (0..5).max_by(|&a, &b| bc[a].total_cmp(&bc[b])).unwrap();
        assert_eq!(best, 2);
    }

    #[test]
    fn routing_example_distance() {
        let g = Graph::new(5, true, [(0, 2, 3.0), (0, 3, 7.0), (1, 0, 2.0), (1, 4, 8.0), (2, 4, 1.0), (3, 4, 3.0)]).unwrap();
        assert_eq!(weighted_distances(&g, 1)[4], 6.0);
        assert_eq!(max_flow(&g, 1, 4), 10.0);
    }

    #[test]
    fn components_and_cut_vertices() {
        let g = Graph::new(6, false, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]).unwrap();
        assert_eq!(component_count(&g), 2);
        assert_eq!(articulation_points(&g), vec![1]);
        assert!(on_cycle_undirected(&g, 4));
        assert!(!on_cycle_undirected(&g, 1));
        assert_eq!(component_of(&g)[5], vec![3, 4, 5]);
        assert_eq!(weak_ball(&g, 0, 1), vec![0, 1]);
    }
}
