//! Immutable sparse graphs.
//!
//! A [`Graph`] owns a canonical, sorted edge list plus CSR adjacency built once
//! at construction. Undirected graphs store each edge once as `(min, max)`;
//! parallel edges are merged by summing their weights. Self-loops are rejected.

mod generate;
mod io;
mod laplacian;

pub use generate::{generate_synthetic, GraphFamily, GraphGenSpec};
pub use io::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list};
pub use laplacian::{normalized_laplacian, LaplacianOperator, SparseSymMatrix};

use crate::error::GraphError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Dense row-major node feature matrix (`rows × cols`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, GraphError> {
        if data.len() != rows * cols {
            return Err(GraphError::Validation(format!(
                "feature matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(GraphError::Validation("non-finite feature value".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        FeatureMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Compressed sparse row adjacency.
#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Csr {
    fn build(n: usize, pairs: impl Iterator<Item = (usize, usize, f64)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (s, _, _) in pairs.clone() {
            offsets[s + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let total = offsets[n];
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; total];
        let mut weights = vec![0.0; total];
        for (s, d, w) in pairs {
            let slot = cursor[s];
            targets[slot] = d;
            weights[slot] = w;
            cursor[s] += 1;
        }
        // Sort each row so neighbor iteration is by ascending id.
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            if hi - lo > 1 {
                let mut row: Vec<(usize, f64)> = targets[lo..hi]
                    .iter()
                    .copied()
                    .zip(weights[lo..hi].iter().copied())
                    .collect();
                row.sort_by_key(|&(t, _)| t);
                for (k, (t, w)) in row.into_iter().enumerate() {
                    targets[lo + k] = t;
                    weights[lo + k] = w;
                }
            }
        }
        Csr {
            offsets,
            targets,
            weights,
        }
    }

    fn row(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    fn len(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Immutable sparse graph with optional edge weights, node features, and labels.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    directed: bool,
    edges: Vec<Edge>,
    features: Option<FeatureMatrix>,
    node_labels: Option<Vec<String>>,
    out_adj: Csr,
    in_adj: Option<Csr>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.directed == other.directed
            && self.edges == other.edges
            && self.features == other.features
            && self.node_labels == other.node_labels
    }
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// Parallel edges are merged by weight summation; undirected edges are
    /// canonicalized to `(min, max)`. Out-of-range endpoints, self-loops, and
    /// non-finite weights are validation errors.
    pub fn new(
        node_count: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (s, d, w) in edges {
            if s >= node_count || d >= node_count {
                return Err(GraphError::Validation(format!(
                    "edge ({s}, {d}) out of range for {node_count} nodes"
                )));
            }
            if s == d {
                return Err(GraphError::Validation(format!("self-loop on node {s}")));
            }
            if !w.is_finite() {
                return Err(GraphError::Validation(format!(
                    "non-finite weight on edge ({s}, {d})"
                )));
            }
            let key = if directed || s < d { (s, d) } else { (d, s) };
            *merged.entry(key).or_insert(0.0) += w;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        Ok(Self::from_canonical(node_count, directed, edges))
    }

    fn from_canonical(node_count: usize, directed: bool, edges: Vec<Edge>) -> Self {
        let (out_adj, in_adj) = if directed {
            let out = Csr::build(node_count, edges.iter().map(|e| (e.src, e.dst, e.weight)));
            let inn = Csr::build(node_count, edges.iter().map(|e| (e.dst, e.src, e.weight)));
            (out, Some(inn))
        } else {
            let both = edges
                .iter()
                .flat_map(|e| [(e.src, e.dst, e.weight), (e.dst, e.src, e.weight)]);
            (Csr::build(node_count, both), None)
        };
        Graph {
            node_count,
            directed,
            edges,
            features: None,
            node_labels: None,
            out_adj,
            in_adj,
        }
    }

    pub fn empty(directed: bool) -> Self {
        Self::from_canonical(0, directed, Vec::new())
    }

    pub fn with_features(mut self, features: FeatureMatrix) -> Result<Self, GraphError> {
        if features.rows() != self.node_count {
            return Err(GraphError::Validation(format!(
                "feature matrix has {} rows for {} nodes",
                features.rows(),
                self.node_count
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.node_count {
            return Err(GraphError::Validation(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count
            )));
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn without_features(&self) -> Graph {
        let mut g = self.clone();
        g.features = None;
        g
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn features(&self) -> Option<&FeatureMatrix> {
        self.features.as_ref()
    }

    pub fn feature_cols(&self) -> usize {
        self.features.as_ref().map_or(0, FeatureMatrix::cols)
    }

    pub fn node_labels(&self) -> Option<&[String]> {
        self.node_labels.as_deref()
    }

    /// Label of `v`, falling back to its numeric id.
    pub fn label(&self, v: usize) -> String {
        match &self.node_labels {
            Some(labels) => labels[v].clone(),
            None => v.to_string(),
        }
    }

    /// Successors for directed graphs, all neighbors for undirected ones.
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.out_adj.row(v)
    }

    /// Predecessors for directed graphs, all neighbors for undirected ones.
    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.in_adj.as_ref().unwrap_or(&self.out_adj).row(v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.len(v)
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.as_ref().unwrap_or(&self.out_adj).len(v)
    }

    /// Total degree: `in + out` for directed graphs, neighbor count otherwise.
    pub fn degree(&self, v: usize) -> usize {
        if self.directed {
            self.out_degree(v) + self.in_degree(v)
        } else {
            self.out_degree(v)
        }
    }

    /// Neighbors ignoring direction, ascending, without duplicates.
    pub fn weak_neighbors(&self, v: usize) -> Vec<usize> {
        if !self.directed {
            return self.out_adj.row(v).map(|(u, _)| u).collect();
        }
        let mut out: Vec<usize> = self
            .out_neighbors(v)
            .chain(self.in_neighbors(v))
            .map(|(u, _)| u)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.node_count || v >= self.node_count {
            return None;
        }
        self.out_neighbors(u).find(|&(t, _)| t == v).map(|(_, w)| w)
    }

    /// Undirected view with `A_sym = max(A, Aᵀ)`. Clones undirected graphs.
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.src.min(e.dst), e.src.max(e.dst));
            let slot = merged.entry(key).or_insert(f64::NEG_INFINITY);
            *slot = slot.max(e.weight);
        }
        let edges = merged
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        let mut g = Self::from_canonical(self.node_count, false, edges);
        g.features = self.features.clone();
        g.node_labels = self.node_labels.clone();
        g
    }

    /// Subgraph induced by `nodes`, re-compacted in ascending id order.
    ///
    /// Node labels of the result hold the parent ids so the mapping back is
    /// retained; the second return value is the same mapping as integers.
    pub fn induced_subgraph_with_map(
        &self,
        nodes: &[usize],
    ) -> Result<(Graph, Vec<usize>), GraphError> {
        let mut keep: Vec<usize> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&v| v >= self.node_count) {
            return Err(GraphError::Validation(format!(
                "node {bad} not in graph of {} nodes",
                self.node_count
            )));
        }
        let mut local = vec![usize::MAX; self.node_count];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| local[e.src] != usize::MAX && local[e.dst] != usize::MAX)
            .map(|e| Edge {
                src: local[e.src],
                dst: local[e.dst],
                weight: e.weight,
            })
            .collect();
        // Relabeling is monotone, so canonical order and orientation survive.
        let mut g = Self::from_canonical(keep.len(), self.directed, edges);
        g.features = self.features.as_ref().map(|f| f.select_rows(&keep));
        g.node_labels = Some(keep.iter().map(|v| v.to_string()).collect());
        Ok((g, keep))
    }

    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph, GraphError> {
        self.induced_subgraph_with_map(nodes).map(|(g, _)| g)
    }

    /// SHA-256 over the canonical structure (node count, direction, edges).
    pub fn structural_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.node_count as u64).to_le_bytes());
        h.update([u8::from(self.directed)]);
        for e in &self.edges {
            h.update((e.src as u64).to_le_bytes());
            h.update((e.dst as u64).to_le_bytes());
            h.update(e.weight.to_bits().to_le_bytes());
        }
        if let Some(f) = &self.features {
            h.update((f.cols as u64).to_le_bytes());
            for v in &f.data {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_edges_are_canonical_and_merged() {
        let g = Graph::new(3, false, [(1, 0, 1.0), (0, 1, 2.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0], Edge { src: 0, dst: 1, weight: 3.0 });
        assert_eq!(g.edges()[1], Edge { src: 1, dst: 2, weight: 1.0 });
        assert_eq!(g.weak_neighbors(1), vec![0, 2]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(2, false, [(0, 2, 1.0)]).is_err());
        assert!(Graph::new(2, false, [(1, 1, 1.0)]).is_err());
        assert!(Graph::new(2, true, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn feature_rows_must_match() {
        let g = Graph::new(2, false, [(0, 1, 1.0)]).unwrap();
        let f = FeatureMatrix::new(3, 1, vec![0.0; 3]).unwrap();
        assert!(g.with_features(f).is_err());
    }

    #[test]
    fn induced_subgraph_identity_and_empty() {
        let g = Graph::new(4, false, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let all = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(all.edges(), g.edges());
        let none = g.induced_subgraph(&[]).unwrap();
        assert_eq!((none.node_count(), none.edge_count()), (0, 0));
        assert!(g.induced_subgraph(&[7]).is_err());
    }

    #[test]
    fn fund_flow_neighborhood_subgraph() {
        // Transfers around node 15 from the fund-flow walkthrough.
        let edges = [
            (15, 16, 400.0),
            (15, 17, 200.0),
            (10, 15, 880.0),
            (10, 16, 300.0),
            (10, 17, 100.0),
            (16, 17, 50.0),
        ];
        let g = Graph::new(18, true, edges).unwrap();
        let (sub, map) = g.induced_subgraph_with_map(&[10, 16, 17]).unwrap();
        assert_eq!(sub.edge_count(), 3);
        assert_eq!(map, vec![10, 16, 17]);
        assert_eq!(sub.node_labels().unwrap(), ["10", "16", "17"]);
    }

    #[test]
    fn to_undirected_takes_max_weight() {
        let g = Graph::new(2, true, [(0, 1, 2.0), (1, 0, 5.0)]).unwrap();
        let u = g.to_undirected();
        assert_eq!(u.edges(), &[Edge { src: 0, dst: 1, weight: 5.0 }]);
    }
}
