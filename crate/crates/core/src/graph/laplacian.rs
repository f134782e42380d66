//! Normalized Laplacian `L = I − D^{-1/2} A D^{-1/2}`.
//!
//! Directed graphs are symmetrized with `max(A, Aᵀ)` first. Isolated nodes get
//! a diagonal entry of 1 and no off-diagonal entries.

use super::Graph;

/// Symmetric sparse matrix in coordinate form; both `(i, j)` and `(j, i)` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .iter()
            .filter(|&&(r, c, _)| r == i && c == j)
            .map(|&(_, _, v)| v)
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for &(r, c, v) in &self.entries {
            out[r][c] += v;
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let dense = self.to_dense();
        (0..self.dim).all(|i| (0..self.dim).all(|j| (dense[i][j] - dense[j][i]).abs() <= tol))
    }
}

pub fn normalized_laplacian(g: &Graph) -> SparseSymMatrix {
    let op = LaplacianOperator::new(g);
    let mut entries = Vec::with_capacity(op.dim + op.cols.len());
    for i in 0..op.dim {
        entries.push((i, i, 1.0));
        for k in op.offsets[i]..op.offsets[i + 1] {
            entries.push((i, op.cols[k], -op.vals[k]));
        }
    }
    SparseSymMatrix {
        dim: op.dim,
        entries,
    }
}

/// Matrix-free form of the normalized Laplacian used by iterative solvers.
///
/// Stores `S = D^{-1/2} A D^{-1/2}` in CSR; `L x = x − S x`.
#[derive(Debug, Clone)]
pub struct LaplacianOperator {
    dim: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    sqrt_degree: Vec<f64>,
}

impl LaplacianOperator {
    pub fn new(g: &Graph) -> Self {
        let sym = g.to_undirected();
        let n = sym.node_count();
        let degree: Vec<f64> = (0..n)
            .map(|v| sym.out_neighbors(v).map(|(_, w)| w).sum())
            .collect();
        let sqrt_degree: Vec<f64> = degree.iter().map(|d| d.sqrt()).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(2 * sym.edge_count());
        let mut vals = Vec::with_capacity(2 * sym.edge_count());
        offsets.push(0);
        for i in 0..n {
            for (j, w) in sym.out_neighbors(i) {
                let denom = sqrt_degree[i] * sqrt_degree[j];
                if denom > 0.0 && w != 0.0 {
                    cols.push(j);
                    vals.push(w / denom);
                }
            }
            offsets.push(cols.len());
        }
        Self {
            dim: n,
            offsets,
            cols,
            vals,
            sqrt_degree,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D^{1/2}` diagonal; restricted to a connected component it spans the null space.
    pub fn sqrt_degree(&self) -> &[f64] {
        &self.sqrt_degree
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.dim {
            let mut acc = x[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc -= self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }
}
