use crate::graph::Graph;
use indexmap::IndexMap;
use sha2::{Digest, Sha256};
use std::sync::Arc;

/// The externalized working set: current subgraph, per-node score columns,
/// and the descriptions produced so far.
///
/// Cloning is cheap; the graph and columns are shared and never mutated.
#[derive(Debug, Clone)]
pub struct MemoryState {
    subgraph: Arc<Graph>,
    parent_map: Arc<Vec<usize>>,
    score_columns: IndexMap<String, Arc<Vec<f64>>>,
    history: Vec<String>,
}

impl MemoryState {
    /// Memory covering the whole graph: no score columns, empty history.
    pub fn from_graph(graph: Arc<Graph>) -> Self {
        let n = graph.node_count();
        Self {
            subgraph: graph,
            parent_map: Arc::new((0..n).collect()),
            score_columns: IndexMap::new(),
            history: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        Self::from_graph(Arc::new(Graph::empty(false)))
    }

    pub fn subgraph(&self) -> &Graph {
        &self.subgraph
    }

    pub fn shared_subgraph(&self) -> Arc<Graph> {
        Arc::clone(&self.subgraph)
    }

    pub fn node_count(&self) -> usize {
        self.subgraph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.subgraph.edge_count()
    }

    pub fn base_feature_cols(&self) -> usize {
        self.subgraph.feature_cols()
    }

    /// `d_f`: base feature columns plus appended score columns.
    pub fn feature_dims(&self) -> usize {
        self.base_feature_cols() + self.score_columns.len()
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    /// Original graph ids of the current nodes, ascending.
    pub fn original_ids(&self) -> &[usize] {
        &self.parent_map
    }

    pub fn original_of(&self, local: usize) -> usize {
        self.parent_map[local]
    }

    pub fn local_of(&self, original: usize) -> Option<usize> {
        self.parent_map.binary_search(&original).ok()
    }

    pub fn score_columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.score_columns
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn score_column_names(&self) -> Vec<String> {
        self.score_columns.keys().cloned().collect()
    }

    pub fn last_score_column(&self) -> Option<&str> {
        self.score_columns.keys().last().map(String::as_str)
    }

    /// Looks up a score column, or a base feature column named `x<i>`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        if let Some(c) = self.score_columns.get(name) {
            return Some(c.as_ref().clone());
        }
        let idx: usize = name.strip_prefix('x')?.parse().ok()?;
        let f = self.subgraph.features()?;
        (idx < f.cols()).then(|| f.column(idx))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.score_columns.contains_key(name)
            || name
                .strip_prefix('x')
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| i < self.base_feature_cols())
    }

    /// Copy with `name` set to `values`; an existing column of the same name is replaced in place.
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.node_count());
        let mut next = self.clone();
        next.score_columns.insert(name.to_string(), Arc::new(values));
        next
    }

    /// Copy restricted to the given local node ids (induced subgraph); columns are sliced.
    pub fn restricted(&self, local_nodes: &[usize]) -> Self {
        let (sub, keep) = self
            .subgraph
            .induced_subgraph_with_map(local_nodes)
            .expect("local ids come from this subgraph");
        let parent_map: Vec<usize> = keep.iter().map(|&l| self.parent_map[l]).collect();
        let score_columns = self
            .score_columns
            .iter()
            .map(|(k, v)| (k.clone(), Arc::new(keep.iter().map(|&l| v[l]).collect())))
            .collect();
        Self {
            subgraph: Arc::new(sub),
            parent_map: Arc::new(parent_map),
            score_columns,
            history: self.history.clone(),
        }
    }

    pub fn without_base_features(&self) -> Self {
        let mut next = self.clone();
        next.subgraph = Arc::new(self.subgraph.without_features());
        next
    }

    pub fn with_history_entry(mut self, description: String) -> Self {
        self.history.push(description);
        self
    }

    /// Digest over every field, used to check that tools never touch their input.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.subgraph.structural_hash().as_bytes());
        for id in self.parent_map.iter() {
            h.update((*id as u64).to_le_bytes());
        }
        for (k, v) in &self.score_columns {
            h.update(k.as_bytes());
            for x in v.iter() {
                h.update(x.to_bits().to_le_bytes());
            }
        }
        for d in &self.history {
            h.update(d.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FeatureMatrix;

    fn sample() -> MemoryState {
        let g = Graph::new(4, false, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
            .unwrap()
            .with_features(FeatureMatrix::new(4, 1, vec![0.1, 0.9, 0.5, 0.3]).unwrap())
            .unwrap();
        MemoryState::from_graph(Arc::new(g))
    }

    #[test]
    fn columns_and_features() {
        let m = sample().with_column("score", vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.feature_dims(), 2);
        assert_eq!(m.column("x0").unwrap()[1], 0.9);
        assert!(m.column("x1").is_none());
        assert!(m.has_column("score"));
    }

    #[test]
    fn restriction_composes_parent_map() {
        let m = sample().with_column("score", vec![1.0, 2.0, 3.0, 4.0]);
        let a = m.restricted(&[1, 2, 3]);
        let b = a.restricted(&[0, 2]);
        assert_eq!(b.original_ids(), &[1, 3]);
        assert_eq!(b.column("score").unwrap(), vec![2.0, 4.0]);
        assert_eq!(b.column("x0").unwrap(), vec![0.9, 0.3]);
        assert_eq!(b.local_of(3), Some(1));
        assert_eq!(b.local_of(2), None);
        assert_eq!(b.edge_count(), 0);
    }

    #[test]
    fn digest_tracks_changes() {
        let m = sample();
        let d = m.digest();
        assert_eq!(d, m.clone().digest());
        assert_ne!(d, m.clone().with_history_entry("x".into()).digest());
    }
}
