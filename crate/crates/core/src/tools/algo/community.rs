//! Clustering coefficients and community detection on the unweighted undirected view.

use super::{undirected_adjacency, weak_components};
use crate::graph::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Triangles through each node.
pub fn triangles(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mark = vec![usize::MAX; n];
    (0..n)
        .map(|v| {
            for &u in &adj[v] {
                mark[u] = v;
            }
            let mut t = 0;
            for &u in &adj[v] {
                for &w in &adj[u] {
                    if w > u && mark[w] == v {
                        t += 1;
                    }
                }
            }
            t
        })
        .collect()
}

pub fn clustering(adj: &[Vec<usize>]) -> Vec<f64> {
    triangles(adj)
        .into_iter()
        .zip(adj)
        .map(|(t, nbrs)| {
            let d = nbrs.len();
            if d < 2 {
                0.0
            } else {
                2.0 * t as f64 / (d * (d - 1)) as f64
            }
        })
        .collect()
}

/// Fraction of connected triples that close into triangles.
pub fn transitivity(adj: &[Vec<usize>]) -> f64 {
    let tri: usize = triangles(adj).iter().sum();
    let triples: usize = adj.iter().map(|a| a.len() * a.len().saturating_sub(1) / 2).sum();
    if triples == 0 {
        0.0
    } else {
        tri as f64 / triples as f64
    }
}

/// Newman modularity of a partition given as a label per node.
pub fn modularity(adj: &[Vec<usize>], label: &[usize]) -> f64 {
    let two_m: f64 = adj.iter().map(|a| a.len() as f64).sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let k = label.iter().copied().max().map_or(0, |m| m + 1);
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for (v, nbrs) in adj.iter().enumerate() {
        total[label[v]] += nbrs.len() as f64;
        internal[label[v]] += nbrs.iter().filter(|&&u| label[u] == label[v]).count() as f64;
    }
    (0..k)
        .map(|c| internal[c] / two_m - (total[c] / two_m).powi(2))
        .sum()
}

/// Relabels so communities are numbered by their smallest member.
pub fn canonical_labels(label: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut remap = std::collections::HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let out = label
        .iter()
        .enumerate()
        .map(|(v, l)| {
            let next = remap.len();
            let c = *remap.entry(*l).or_insert(next);
            if c == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[c].push(v);
            c
        })
        .collect();
    (out, blocks)
}

/// Weighted graph used by Louvain's aggregation levels.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[v]
    }
}

/// One local-moving phase; returns the community of each level node and whether anything moved.
fn local_moves(level: &Level, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = level.adj.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let degree: Vec<f64> = (0..n).map(|v| level.degree(v)).collect();
    let mut tot = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut moved_any = false;
    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut moved = false;
        for &v in &order {
            let own = comm[v];
            for &(u, w) in &level.adj[v] {
                if weight_to[comm[u]] == 0.0 {
                    touched.push(comm[u]);
                }
                weight_to[comm[u]] += w;
            }
            tot[own] -= degree[v];
            let gain = |c: usize, w_in: f64| w_in - tot[c] * degree[v] / two_m;
            let mut best = (own, gain(own, weight_to[own]));
            for &c in &touched {
                let g = gain(c, weight_to[c]);
                if g > best.1 + 1e-12 {
                    best = (c, g);
                }
            }
            tot[best.0] += degree[v];
            if best.0 != own {
                comm[v] = best.0;
                moved = true;
                moved_any = true;
            }
            for c in touched.drain(..) {
                weight_to[c] = 0.0;
            }
        }
        if !moved {
            break;
        }
    }
    (comm, moved_any)
}

/// Multi-level Louvain with a seeded node order. Returns a label per node
/// (numbered by smallest member) and the partition's modularity. Falls back to
/// connected components if the result has negative modularity.
pub fn louvain(g: &Graph, seed: u64) -> (Vec<usize>, f64) {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    let two_m: f64 = adj.iter().map(|a| a.len() as f64).sum();
    if two_m == 0.0 {
        return ((0..n).collect(), 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level {
        adj: adj.iter().map(|a| a.iter().map(|&u| (u, 1.0)).collect()).collect(),
        self_loops: vec![0.0; n],
    };
    let mut best_q = modularity(&adj, &membership);
    loop {
        let (comm, moved) = local_moves(&level, two_m, &mut rng);
        if !moved {
            break;
        }
        let (comm, blocks) = canonical_labels(&comm);
        let candidate: Vec<usize> = membership.iter().map(|&c| comm[c]).collect();
        let q = modularity(&adj, &candidate);
        if q - best_q < 1e-7 {
            if q > best_q {
                membership = candidate;
                best_q = q;
            }
            break;
        }
        membership = candidate;
        best_q = q;
        // Aggregate communities into super-nodes.
        let k = blocks.len();
        let mut agg: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        let mut self_loops = vec![0.0; k];
        for (v, nbrs) in level.adj.iter().enumerate() {
            self_loops[comm[v]] += level.self_loops[v];
            for &(u, w) in nbrs {
                if comm[u] == comm[v] {
                    // Each internal edge is seen from both ends.
                    self_loops[comm[v]] += w / 2.0;
                } else {
                    *agg[comm[v]].entry(comm[u]).or_insert(0.0) += w;
                }
            }
        }
        level = Level {
            adj: agg.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        };
    }
    if best_q < 0.0 {
        let mut label = vec![0; n];
        for (c, block) in weak_components(g).iter().enumerate() {
            for &v in block {
                label[v] = c;
            }
        }
        let q = modularity(&adj, &label);
        return (label, q);
    }
    let (label, _) = canonical_labels(&membership);
    (label, best_q)
}

/// Asynchronous label propagation with seeded order and tie-breaking.
pub fn label_propagation(g: &Graph, seed: u64) -> Vec<usize> {
    let adj = undirected_adjacency(g);
    let n = adj.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts = vec![0usize; n];
    for _ in 0..1_000 {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            if adj[v].is_empty() {
                continue;
            }
            for &u in &adj[v] {
                counts[label[u]] += 1;
            }
            let best = adj[v].iter().map(|&u| counts[label[u]]).max().expect("nonempty");
            let mut top: Vec<usize> = adj[v].iter().map(|&u| label[u]).filter(|&l| counts[l] == best).collect();
            top.sort_unstable();
            top.dedup();
            for &u in &adj[v] {
                counts[label[u]] = 0;
            }
            if !top.contains(&label[v]) {
                label[v] = top[rng.random_range(0..top.len())];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    canonical_labels(&label).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_synthetic, GraphFamily, GraphGenSpec};

    fn two_triangles() -> Graph {
        Graph::new(6, false, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]).unwrap()
    }

    #[test]
    fn triangle_counts() {
        let adj = undirected_adjacency(&two_triangles());
        assert_eq!(triangles(&adj), vec![1; 6]);
        assert_eq!(clustering(&adj), vec![1.0; 6]);
        assert_eq!(transitivity(&adj), 1.0);
    }

    #[test]
    fn louvain_disjoint_triangles() {
        let (label, q) = louvain(&two_triangles(), 0);
        assert_eq!(label, vec![0, 0, 0, 1, 1, 1]);
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn louvain_complete_graph_is_one_community() {
        let g = generate_synthetic(&GraphGenSpec::new(GraphFamily::Complete { n: 5 }, 0)).unwrap();
        let (label, q) = louvain(&g, 3);
        assert!(label.iter().all(|&l| l == 0), "{label:?}");
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn louvain_recovers_planted_blocks() {
        let spec = GraphGenSpec::new(
            GraphFamily::StochasticBlock { sizes: vec![15, 15], p_in: 0.9, p_out: 0.05 },
            11,
        );
        let g = generate_synthetic(&spec).unwrap();
        let (label, q) = louvain(&g, 0);
        assert!(q >= 0.0);
        let agree = (0..30).filter(|&v| (label[v] == label[0]) == (v < 15)).count();
        assert!(agree.max(30 - agree) >= 27, "{label:?}");
    }

    #[test]
    fn label_propagation_separates_components() {
        let label = label_propagation(&two_triangles(), 5);
        assert_eq!(label, vec![0, 0, 0, 1, 1, 1]);
    }
}
