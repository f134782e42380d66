//! Graph algorithms behind the tool library.
//!
//! Everything here works on local ids of a single [`Graph`]; mapping to
//! original ids is the caller's job. Tie-breaking is by ascending node id.

pub mod centrality;
pub mod community;
pub mod connectivity;
pub mod cycles;
pub mod flow;
pub mod paths;
pub mod topo;

use crate::graph::Graph;

/// Weakly connected component label per node; labels ordered by smallest member.
pub fn weak_component_labels(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for u in g.out_neighbors(v).chain(g.in_neighbors(v)).map(|(u, _)| u) {
                if label[u] == usize::MAX {
                    label[u] = count;
                    stack.push(u);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Groups nodes by label; blocks come out sorted internally and by first member.
pub fn blocks_from_labels(label: &[usize], count: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        blocks[l].push(v);
    }
    blocks.retain(|b| !b.is_empty());
    blocks.sort_by_key(|b| b[0]);
    blocks
}

pub fn weak_components(g: &Graph) -> Vec<Vec<usize>> {
    let (label, count) = weak_component_labels(g);
    blocks_from_labels(&label, count)
}

/// Sorted neighbor lists of the undirected view, ignoring weights.
pub fn undirected_adjacency(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.node_count()).map(|v| g.weak_neighbors(v)).collect()
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    /// Blocks of the partition, each sorted, ordered by smallest member.
    pub fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].push(v);
        }
        let mut blocks: Vec<Vec<usize>> = by_root.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_two_triangles() {
        let g = Graph::new(6, false, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])
            .unwrap();
        assert_eq!(weak_components(&g), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn directed_components_ignore_direction() {
        let g = Graph::new(4, true, [(1, 0, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(weak_components(&g), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn union_find_blocks() {
        let mut uf = UnionFind::new(5);
        uf.union(4, 1);
        uf.union(2, 3);
        assert!(!uf.union(1, 4));
        assert_eq!(uf.blocks(), vec![vec![0], vec![1, 4], vec![2, 3]]);
    }
}
