//! Exhaustive reference computations for tiny graphs (n ≤ 12).
//!
//! Everything here works from the raw edge list by enumeration — simple
//! paths, all source-side cuts, vertex deletions — and shares no code with
//! the library's algorithms.
#![allow(dead_code)]

use graphdistill::Graph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Tiny {
    pub n: usize,
    pub directed: bool,
    /// Distinct canonical edges with positive integer weights.
    pub edges: Vec<(usize, usize, f64)>,
}

impl Tiny {
    pub fn random(rng: &mut ChaCha8Rng, max_n: usize) -> Self {
        let n = rng.random_range(3..=max_n);
        let directed = rng.random::<bool>();
        let p = rng.random_range(0.12..0.35);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u == v || (!directed && v < u) {
                    continue;
                }
                if rng.random::<f64>() < p {
                    edges.push((u, v, f64::from(rng.random_range(1u32..=5))));
                }
            }
        }
        Self { n, directed, edges }
    }

    pub fn graph(&self) -> Graph {
        Graph::new(self.n, self.directed, self.edges.iter().copied()).expect("valid tiny graph")
    }

    /// Out-arcs; undirected edges appear in both directions.
    pub fn arcs(&self) -> Vec<Vec<(usize, f64)>> {
        let mut a = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            a[u].push((v, w));
            if !self.directed {
                a[v].push((u, w));
            }
        }
        a
    }

    fn undirected_arcs(&self, removed: Option<usize>) -> Vec<Vec<usize>> {
        let mut a = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            if Some(u) == removed || Some(v) == removed {
                continue;
            }
            a[u].push(v);
            a[v].push(u);
        }
        a
    }
}

/// Calls `visit` with every simple path from `s` to `t` of at most `max_len`
/// arcs, stopping early once `visit` returns `false`. `bound` prunes partial
/// paths whose cost already reaches it.
fn each_simple_path(
    arcs: &[Vec<(usize, f64)>],
    s: usize,
    t: usize,
    max_len: usize,
    bound: &dyn Fn() -> f64,
    visit: &mut dyn FnMut(&[usize], f64) -> bool,
) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        arcs: &[Vec<(usize, f64)>],
        t: usize,
        max_len: usize,
        path: &mut Vec<usize>,
        on: &mut [bool],
        cost: f64,
        bound: &dyn Fn() -> f64,
        visit: &mut dyn FnMut(&[usize], f64) -> bool,
    ) -> bool {
        let v = *path.last().expect("non-empty");
        if v == t {
            return visit(path, cost);
        }
        if path.len() > max_len || cost >= bound() {
            return true;
        }
        for &(w, c) in &arcs[v] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                let more = go(arcs, t, max_len, path, on, cost + c, bound, visit);
                path.pop();
                on[w] = false;
                if !more {
                    return false;
                }
            }
        }
        true
    }
    let mut on = vec![false; arcs.len()];
    on[s] = true;
    go(arcs, t, max_len, &mut vec![s], &mut on, 0.0, bound, visit);
}

fn unbounded() -> f64 {
    f64::INFINITY
}

/// `reach[s][t]`: a directed walk leads from `s` to `t`.
fn reachability(g: &Tiny) -> Vec<Vec<bool>> {
    let arcs = g.arcs();
    (0..g.n)
        .map(|s| {
            let mut seen = vec![false; g.n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &(w, _) in &arcs[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Hop distances: the shortest length at which a simple path exists,
/// found by iterative deepening (`None` when unreachable).
pub fn hop_distances(g: &Tiny) -> Vec<Vec<Option<usize>>> {
    let arcs = g.arcs();
    let reach = reachability(g);
    let mut d = vec![vec![None; g.n]; g.n];
    for s in 0..g.n {
        d[s][s] = Some(0);
        for t in 0..g.n {
            if s == t || !reach[s][t] {
                continue;
            }
            for len in 1..g.n {
                let mut found = false;
                each_simple_path(&arcs, s, t, len, &unbounded, &mut |_, _| {
                    found = true;
                    false
                });
                if found {
                    d[s][t] = Some(len);
                    break;
                }
            }
        }
    }
    d
}

/// Minimum total weight over all simple `s → t` paths (branch and bound on
/// positive weights).
pub fn min_path_weight(g: &Tiny, s: usize, t: usize) -> Option<f64> {
    let best = std::cell::Cell::new(f64::INFINITY);
    each_simple_path(&g.arcs(), s, t, g.n, &|| best.get(), &mut |_, c| {
        best.set(best.get().min(c));
        true
    });
    best.get().is_finite().then(|| best.get())
}

/// Ordered-pair betweenness from explicit shortest-path lists, scaled by `1/((n−1)(n−2))`.
pub fn betweenness(g: &Tiny) -> Vec<f64> {
    let arcs = g.arcs();
    let d = hop_distances(g);
    let mut bc = vec![0.0; g.n];
    for s in 0..g.n {
        for t in 0..g.n {
            let Some(len) = d[s][t] else { continue };
            if s == t {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            each_simple_path(&arcs, s, t, len, &unbounded, &mut |p, _| {
                if p.len() - 1 == len {
                    paths.push(p.to_vec());
                }
                true
            });
            let total = paths.len() as f64;
            for (v, b) in bc.iter_mut().enumerate() {
                if v != s && v != t {
                    *b += paths.iter().filter(|p| p.contains(&v)).count() as f64 / total;
                }
            }
        }
    }
    if g.n > 2 {
        let scale = 1.0 / ((g.n - 1) * (g.n - 2)) as f64;
        bc.iter_mut().for_each(|b| *b *= scale);
    }
    bc
}

/// Wasserman–Faust closeness over incoming hop distances.
pub fn closeness(g: &Tiny) -> Vec<f64> {
    let d = hop_distances(g);
    (0..g.n)
        .map(|u| {
            let incoming: Vec<usize> = (0..g.n).filter(|&v| v != u).filter_map(|v| d[v][u]).collect();
            let total: usize = incoming.iter().sum();
            if total == 0 {
                return 0.0;
            }
            let r = incoming.len() as f64;
            (r / total as f64) * (r / (g.n - 1) as f64)
        })
        .collect()
}

pub fn harmonic(g: &Tiny) -> Vec<f64> {
    let d = hop_distances(g);
    (0..g.n)
        .map(|u| (0..g.n).filter(|&v| v != u).filter_map(|v| d[v][u]).map(|k| 1.0 / k as f64).sum())
        .collect()
}

/// Minimum `s–t` cut capacity over all `2^(n−2)` source sides.
pub fn min_cut_by_enumeration(g: &Tiny, s: usize, t: usize) -> f64 {
    let others: Vec<usize> = (0..g.n).filter(|&v| v != s && v != t).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; g.n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = mask & (1 << i) != 0;
        }
        let cap: f64 = g
            .edges
            .iter()
            .filter(|&&(u, v, _)| if g.directed { side[u] && !side[v] } else { side[u] != side[v] })
            .map(|e| e.2)
            .sum();
        best = best.min(cap);
    }
    best
}

fn count_components(adj: &[Vec<usize>], skip: Option<usize>) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] || Some(s) == skip {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Weakly connected components.
pub fn component_count(g: &Tiny) -> usize {
    count_components(&g.undirected_arcs(None), None)
}

/// Nodes whose deletion increases the component count of the undirected view.
pub fn articulation_points(g: &Tiny) -> Vec<usize> {
    let base = component_count(g);
    (0..g.n).filter(|&v| count_components(&g.undirected_arcs(Some(v)), Some(v)) > base).collect()
}

/// True when some node reaches itself along a directed simple cycle.
pub fn has_directed_cycle(g: &Tiny) -> bool {
    let reach = reachability(g);
    g.arcs().iter().enumerate().any(|(s, out)| out.iter().any(|&(w, _)| reach[w][s]))
}

/// A permutation of `0..n` in which every arc points forward.
pub fn is_topological_order(g: &Tiny, order: &[usize]) -> bool {
    if order.len() != g.n {
        return false;
    }
    let mut pos = vec![usize::MAX; g.n];
    for (i, &v) in order.iter().enumerate() {
        if v >= g.n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    g.edges.iter().all(|&(u, v, _)| pos[u] < pos[v])
}

// ---- comparison against the library's tools ----

use graphdistill::tools::{ParamValue, Params, Payload};
use graphdistill::{invoke, MemoryState};
use std::sync::Arc;

fn pair(a: &str, x: usize, b: &str, y: usize) -> Params {
    [(a.to_string(), ParamValue::Int(x as u64)), (b.to_string(), ParamValue::Int(y as u64))].into_iter().collect()
}

fn column(m: &MemoryState, tool: &str, col: &str) -> Result<Vec<f64>, String> {
    let r = invoke(tool, m, &Params::new()).map_err(|e| format!("{tool}: {e}"))?;
    r.memory_after.column(col).ok_or_else(|| format!("{tool}: missing column {col}"))
}

fn close(what: &str, got: &[f64], want: &[f64], tol: f64, worst: &mut f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{what}: length {} vs {}", got.len(), want.len()));
    }
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        let e = (a - b).abs();
        *worst = worst.max(e);
        if e > tol {
            return Err(format!("{what}[{i}]: {a} vs {b}"));
        }
    }
    Ok(())
}

/// Checks every oracle-backed tool on `t`; returns the worst absolute error.
/// `pairs` picks how many `(s, t)` pairs get path and flow checks.
pub fn check_tools(t: &Tiny, pairs: usize, rng: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    let m = MemoryState::from_graph(Arc::new(t.graph()));
    let mut worst: f64 = 0.0;
    close("betweenness", &column(&m, "betweenness_centrality", "betweenness")?, &betweenness(t), tol, &mut worst)?;
    close("closeness", &column(&m, "closeness_centrality", "closeness")?, &closeness(t), tol, &mut worst)?;
    close("harmonic", &column(&m, "harmonic_centrality", "harmonic")?, &harmonic(t), tol, &mut worst)?;

    for _ in 0..pairs {
        let s = rng.random_range(0..t.n);
        let d = (s + rng.random_range(1..t.n)) % t.n;
        let r = invoke("dijkstra_path_length", &m, &pair("source", s, "target", d));
        match (r, min_path_weight(t, s, d)) {
            (Ok(r), Some(w)) => match r.raw_payload {
                Payload::Scalar { value } => close("dijkstra_path_length", &[value], &[w], tol, &mut worst)?,
                other => return Err(format!("dijkstra_path_length payload {other:?}")),
            },
            (Err(_), None) => {}
            (r, w) => return Err(format!("dijkstra_path_length {s}->{d}: {:?} vs {w:?}", r.map(|r| r.raw_payload))),
        }
        let want = min_cut_by_enumeration(t, s, d);
        for tool in ["edmonds_karp_min_cut", "dinic_min_cut", "boykov_kolmogorov_min_cut", "minimum_cut"] {
            let r = invoke(tool, &m, &pair("source", s, "sink", d)).map_err(|e| format!("{tool}: {e}"))?;
            match r.raw_payload {
                Payload::Cut { value, .. } => close(tool, &[value], &[want], tol, &mut worst)?,
                other => return Err(format!("{tool} payload {other:?}")),
            }
        }
    }

    match invoke("weakly_connected_components", &m, &Params::new()).map_err(|e| e.to_string())?.raw_payload {
        Payload::Partition { blocks } if blocks.len() == component_count(t) => {}
        other => return Err(format!("components: {other:?} vs {}", component_count(t))),
    }
    match invoke("articulation_points", &m, &Params::new()).map_err(|e| e.to_string())?.raw_payload {
        Payload::Nodes { mut nodes } => {
            nodes.sort_unstable();
            if nodes != articulation_points(t) {
                return Err(format!("articulation points {nodes:?} vs {:?}", articulation_points(t)));
            }
        }
        other => return Err(format!("articulation payload {other:?}")),
    }
    let topo = invoke("topological_sort", &m, &Params::new());
    let acyclic = t.directed && !has_directed_cycle(t);
    match topo {
        Ok(r) => match r.raw_payload {
            Payload::Orders { orders, .. } if acyclic && orders.len() == 1 && is_topological_order(t, &orders[0]) => {}
            other => return Err(format!("topological_sort returned {other:?} (acyclic: {acyclic})")),
        },
        Err(e) if acyclic => return Err(format!("topological_sort failed on a DAG: {e}")),
        Err(_) => {}
    }
    Ok(worst)
}
