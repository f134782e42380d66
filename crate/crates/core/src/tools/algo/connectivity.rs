//! Components, cut vertices/edges, and k-connectivity. All routines except
//! [`strongly_connected`] work on the unweighted undirected view.

use super::flow::FlowNetwork;
use super::{undirected_adjacency, weak_components, UnionFind};
use crate::graph::Graph;

/// Tarjan's algorithm, iterative. Components sorted internally and by smallest member.
pub fn strongly_connected(g: &Graph) -> Vec<Vec<usize>> {
    if !g.is_directed() {
        return weak_components(g);
    }
    let n = g.node_count();
    let succ: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v).map(|(u, _)| u).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Cut vertices and bridges of the undirected view, both sorted.
pub fn articulation_points_and_bridges(g: &Graph) -> (Vec<usize>, Vec<(usize, usize)>) {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut bridges = Vec::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (node, parent, next neighbor index)
        let mut call: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    call.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                call.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        bridges.push((parent.min(v), parent.max(v)));
                    }
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    bridges.sort_unstable();
    ((0..n).filter(|&v| is_cut[v]).collect(), bridges)
}

/// Unit-capacity network of the undirected view.
fn unit_network(adj: &[Vec<usize>]) -> FlowNetwork {
    let mut net = FlowNetwork::new(adj.len());
    for (v, nbrs) in adj.iter().enumerate() {
        for &u in nbrs {
            if v < u {
                net.add_arc(v, u, 1.0, 1.0);
            }
        }
    }
    net
}

/// Gomory–Hu tree by Gusfield's method: `(parent, cut value)` per node, root 0.
pub fn gomory_hu(adj: &[Vec<usize>]) -> Vec<(usize, f64)> {
    let n = adj.len();
    let mut tree = vec![(0usize, 0.0); n];
    let base = unit_network(adj);
    for s in 1..n {
        let t = tree[s].0;
        let mut net = base.clone();
        let value = net.dinic(s, t);
        let side = net.residual_reachable(s);
        tree[s].1 = value;
        for v in s + 1..n {
            if side[v] && tree[v].0 == t {
                tree[v].0 = s;
            }
        }
    }
    tree
}

/// Maximal node sets whose members are pairwise `k`-edge-connected in the whole graph.
pub fn k_edge_components(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    let mut uf = UnionFind::new(n);
    match k {
        0 | 1 => return weak_components(g),
        2 => {
            let (_, bridges) = articulation_points_and_bridges(g);
            for (v, nbrs) in adj.iter().enumerate() {
                for &u in nbrs {
                    if v < u && bridges.binary_search(&(v, u)).is_err() {
                        uf.union(v, u);
                    }
                }
            }
        }
        _ => {
            for (v, &(p, w)) in gomory_hu(&adj).iter().enumerate().skip(1) {
                if w >= k as f64 {
                    uf.union(v, p);
                }
            }
        }
    }
    uf.blocks()
}

/// Local vertex connectivity of non-adjacent `s`, `t` plus a minimum separating set.
fn local_vertex_cut(adj: &[Vec<usize>], s: usize, t: usize) -> (usize, Vec<usize>) {
    let n = adj.len();
    let big = n as f64;
    // Node v splits into v_in = 2v and v_out = 2v + 1.
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let cap = if v == s || v == t { big } else { 1.0 };
        net.add_arc(2 * v, 2 * v + 1, cap, 0.0);
        for &u in &adj[v] {
            net.add_arc(2 * v + 1, 2 * u, big, 0.0);
        }
    }
    let value = net.dinic(2 * s + 1, 2 * t);
    let side = net.residual_reachable(2 * s + 1);
    let cut = (0..n).filter(|&v| side[2 * v] && !side[2 * v + 1]).collect();
    (value.round() as usize, cut)
}

/// Vertex connectivity of the undirected view and, unless the graph is
/// complete or trivially small, a minimum vertex cut (Esfahanian–Hakimi).
pub fn node_connectivity_with_cut(adj: &[Vec<usize>]) -> (usize, Option<Vec<usize>>) {
    let n = adj.len();
    if n <= 1 {
        return (0, None);
    }
    let comps = {
        let mut uf = UnionFind::new(n);
        for (v, nbrs) in adj.iter().enumerate() {
            for &u in nbrs {
                uf.union(v, u);
            }
        }
        uf.blocks()
    };
    if comps.len() > 1 {
        return (0, Some(Vec::new()));
    }
    let v = (0..n).min_by_key(|&v| (adj[v].len(), v)).expect("n > 1");
    if adj[v].len() == n - 1 {
        return (n - 1, None);
    }
    let mut best = (adj[v].len(), adj[v].clone());
    let adjacent = |a: usize, b: usize| adj[a].binary_search(&b).is_ok();
    for w in 0..n {
        if w != v && !adjacent(v, w) {
            let (k, cut) = local_vertex_cut(adj, v, w);
            if k < best.0 {
                best = (k, cut);
            }
        }
    }
    let nbrs = &adj[v];
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !adjacent(x, y) {
                let (k, cut) = local_vertex_cut(adj, x, y);
                if k < best.0 {
                    best = (k, cut);
                }
            }
        }
    }
    (best.0, Some(best.1))
}

pub fn node_connectivity(g: &Graph) -> usize {
    node_connectivity_with_cut(&undirected_adjacency(g)).0
}

/// Minimum over `v` of the local edge connectivity between node 0 and `v`.
pub fn edge_connectivity(g: &Graph) -> usize {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    if n <= 1 {
        return 0;
    }
    let base = unit_network(&adj);
    (1..n)
        .map(|v| base.clone().dinic(0, v).round() as usize)
        .min()
        .expect("n > 1")
}

fn restrict(adj: &[Vec<usize>], nodes: &[usize]) -> Vec<Vec<usize>> {
    let mut local = vec![usize::MAX; adj.len()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    nodes
        .iter()
        .map(|&v| adj[v].iter().filter(|&&u| local[u] != usize::MAX).map(|&u| local[u]).collect())
        .collect()
}

/// Iteratively strips nodes of degree below `k`.
fn k_core(adj: &[Vec<usize>], nodes: &[usize], k: usize) -> Vec<usize> {
    let mut alive: Vec<usize> = nodes.to_vec();
    loop {
        let sub = restrict(adj, &alive);
        let keep: Vec<usize> = alive
            .iter()
            .zip(&sub)
            .filter(|(_, nbrs)| nbrs.len() >= k)
            .map(|(&v, _)| v)
            .collect();
        if keep.len() == alive.len() {
            return alive;
        }
        alive = keep;
    }
}

fn components_within(adj: &[Vec<usize>], nodes: &[usize]) -> Vec<Vec<usize>> {
    let sub = restrict(adj, nodes);
    let mut uf = UnionFind::new(nodes.len());
    for (v, nbrs) in sub.iter().enumerate() {
        for &u in nbrs {
            uf.union(v, u);
        }
    }
    uf.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|i| nodes[i]).collect())
        .collect()
}

/// Maximal node sets inducing subgraphs of vertex connectivity `>= k`
/// (connected components when `k <= 1`).
pub fn k_node_components(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    if k <= 1 {
        return weak_components(g);
    }
    let adj = undirected_adjacency(g);
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut work = vec![all];
    while let Some(nodes) = work.pop() {
        let core = k_core(&adj, &nodes, k);
        for comp in components_within(&adj, &core) {
            if comp.len() <= k {
                continue;
            }
            let sub = restrict(&adj, &comp);
            let (kappa, cut) = node_connectivity_with_cut(&sub);
            match cut {
                Some(cut) if kappa < k => {
                    let cut_global: Vec<usize> = cut.iter().map(|&i| comp[i]).collect();
                    let rest: Vec<usize> = comp.iter().copied().filter(|v| !cut_global.contains(v)).collect();
                    for part in components_within(&adj, &rest) {
                        let mut next = part;
                        next.extend(&cut_global);
                        next.sort_unstable();
                        work.push(next);
                    }
                }
                _ => found.push(comp),
            }
        }
    }
    found.sort();
    found.dedup();
    let maximal: Vec<Vec<usize>> = found
        .iter()
        .filter(|a| {
            !found
                .iter()
                .any(|b| b.len() > a.len() && a.iter().all(|x| b.binary_search(x).is_ok()))
        })
        .cloned()
        .collect();
    let mut out = maximal;
    out.sort_by(|a, b| a[0].cmp(&b[0]).then(b.len().cmp(&a.len())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, false, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn scc_of_two_cycles() {
        let g = Graph::new(5, true, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 2, 1.0)])
            .unwrap();
        assert_eq!(strongly_connected(&g), vec![vec![0, 1], vec![2, 3, 4]]);
    }

    #[test]
    fn bowtie_cut_vertex() {
        let g = Graph::new(5, false, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 1.0)])
            .unwrap();
        let (ap, br) = articulation_points_and_bridges(&g);
        assert_eq!(ap, vec![2]);
        assert!(br.is_empty());
    }

    #[test]
    fn path_bridges() {
        let g = Graph::new(3, false, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let (ap, br) = articulation_points_and_bridges(&g);
        assert_eq!(ap, vec![1]);
        assert_eq!(br, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn cycle_connectivities() {
        let g = cycle(6);
        assert_eq!(node_connectivity(&g), 2);
        assert_eq!(edge_connectivity(&g), 2);
        assert_eq!(k_edge_components(&g, 2), vec![(0..6).collect::<Vec<_>>()]);
        assert_eq!(k_edge_components(&g, 3).len(), 6);
    }

    #[test]
    fn complete_graph_connectivity() {
        let g = Graph::new(5, false, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j, 1.0)))).unwrap();
        assert_eq!(node_connectivity(&g), 4);
        assert_eq!(edge_connectivity(&g), 4);
        assert_eq!(k_edge_components(&g, 4), vec![(0..5).collect::<Vec<_>>()]);
    }

    #[test]
    fn k_node_components_of_two_squares_sharing_a_node() {
        // Two 4-cycles glued at node 0: each cycle is 2-connected, the union is not.
        let g = Graph::new(7, false, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 0, 1.0)])
            .unwrap();
        assert_eq!(k_node_components(&g, 2), vec![vec![0, 1, 2, 3], vec![0, 4, 5, 6]]);
        assert!(k_node_components(&g, 3).is_empty());
    }
}
