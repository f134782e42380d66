//! Node centrality indices. Distances are hop counts unless stated otherwise;
//! closeness and harmonic use incoming distances on directed graphs.

use super::paths::bfs;
use crate::graph::Graph;
use nalgebra::DMatrix;
use std::collections::VecDeque;

/// Single-source shortest-path DAG from `s`: (visit order, sigma, predecessors).
fn shortest_path_dag(g: &Graph, s: usize) -> (Vec<usize>, Vec<f64>, Vec<Vec<usize>>) {
    let n = g.node_count();
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds = vec![Vec::new(); n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for (w, _) in g.out_neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    (order, sigma, preds)
}

/// Brandes betweenness over ordered pairs, scaled by `1/((n-1)(n-2))`.
///
/// For undirected graphs each unordered pair is counted twice, which matches
/// the usual normalized definition.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        let (order, sigma, preds) = shortest_path_dag(g, s);
        let mut delta = vec![0.0; n];
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    if n > 2 {
        let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
        bc.iter_mut().for_each(|x| *x *= scale);
    }
    bc
}

/// Percolation centrality with per-node states (sources weighted by their state).
pub fn percolation(g: &Graph, states: &[f64]) -> Vec<f64> {
    let n = g.node_count();
    let total: f64 = states.iter().sum();
    let mut pc = vec![0.0; n];
    for s in 0..n {
        let (order, sigma, preds) = shortest_path_dag(g, s);
        let mut delta = vec![0.0; n];
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                let denom = total - states[w];
                if denom > 0.0 {
                    pc[w] += delta[w] * states[s] / denom;
                }
            }
        }
    }
    if n > 2 {
        let scale = 1.0 / (n - 2) as f64;
        pc.iter_mut().for_each(|x| *x *= scale);
    }
    pc
}

/// Degree over `n - 1` (in + out for directed graphs); all ones when `n == 1`.
pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    if n <= 1 {
        return vec![1.0; n];
    }
    let s = 1.0 / (n - 1) as f64;
    (0..n).map(|v| g.degree(v) as f64 * s).collect()
}

/// Wasserman–Faust closeness: `((r-1)/Σd) · ((r-1)/(n-1))` over the `r` nodes that reach `u`.
pub fn closeness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .map(|u| {
            let dist = bfs(g, u, true);
            let (mut total, mut reach) = (0usize, 0usize);
            for d in dist.iter().flatten() {
                total += d;
                reach += 1;
            }
            if total == 0 || n <= 1 {
                0.0
            } else {
                let r = (reach - 1) as f64;
                (r / total as f64) * (r / (n - 1) as f64)
            }
        })
        .collect()
}

/// Sum of reciprocal distances from every other node to `u`.
pub fn harmonic(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|u| {
            bfs(g, u, true)
                .into_iter()
                .flatten()
                .filter(|&d| d > 0)
                .map(|d| 1.0 / d as f64)
                .sum()
        })
        .collect()
}

/// Unit-norm principal eigenvector of `Aᵀ` (weighted) by shifted power iteration.
/// Returns `(vector, eigenvalue)`, or `None` if it does not converge.
pub fn eigenvector(g: &Graph, max_iter: usize, tol: f64) -> Option<(Vec<f64>, f64)> {
    let n = g.node_count();
    if n == 0 {
        return None;
    }
    let mut x = vec![1.0 / n as f64; n];
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for e in g.edges() {
            y[e.dst] += x[e.src] * e.weight;
            if !g.is_directed() {
                y[e.src] += x[e.dst] * e.weight;
            }
        }
        y
    };
    for _ in 0..max_iter {
        let ax = apply(&x);
        let mut next: Vec<f64> = x.iter().zip(&ax).map(|(a, b)| a + b).collect();
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        next.iter_mut().for_each(|v| *v /= norm);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < n as f64 * tol {
            let ax = apply(&x);
            let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
            return Some((x, lambda));
        }
    }
    None
}

/// Second-order centrality: standard deviation of return times of a random
/// walk made regular by self-loops. Requires a strongly connected graph.
pub fn second_order(g: &Graph) -> Option<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Some(Vec::new());
    }
    let in_w: Vec<f64> = (0..n).map(|v| g.in_neighbors(v).map(|(_, w)| w).sum()).collect();
    let d_max = in_w.iter().copied().fold(0.0, f64::max);
    let mut p = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        for (u, w) in g.out_neighbors(v) {
            p[(v, u)] += w;
        }
        p[(v, v)] += d_max - in_w[v];
    }
    for v in 0..n {
        let row_sum: f64 = p.row(v).sum();
        if row_sum <= 0.0 {
            return None;
        }
        p.row_mut(v).iter_mut().for_each(|x| *x /= row_sum);
    }
    let ones = nalgebra::DVector::<f64>::from_element(n, 1.0);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut q = p.clone();
        q.column_mut(j).fill(0.0);
        let system = DMatrix::<f64>::identity(n, n) - q;
        let m = system.lu().solve(&ones)?;
        let s = 2.0 * m.sum() - (n * (n + 1)) as f64;
        out.push(s.max(0.0).sqrt());
    }
    Some(out)
}

/// Subgraph centrality `Σ_j v_j(u)² e^{λ_j}` of the unweighted undirected view.
pub fn subgraph_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        a[(e.src, e.dst)] = 1.0;
        a[(e.dst, e.src)] = 1.0;
    }
    let eig = a.symmetric_eigen();
    (0..n)
        .map(|u| {
            (0..n)
                .map(|j| eig.eigenvectors[(u, j)].powi(2) * eig.eigenvalues[j].exp())
                .sum()
        })
        .collect()
}
