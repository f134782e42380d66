//! Spectral fingerprint: the `M + 1` smallest eigenvalues of the normalized Laplacian.
//!
//! Lanczos with full reorthogonalization and thick restarts runs on
//! `B = 2I − L` (largest end of `B` = smallest end of `L`). The null space of
//! each nontrivial component, `D^{1/2}·1_C`, is deflated analytically.
//! Converged pairs are locked; a fresh random start then probes the
//! complement until no eigenvalue above the current cut-off remains, which
//! recovers repeated eigenvalues a single Krylov space cannot see.

use crate::error::SttaError;
use crate::graph::{Graph, LaplacianOperator};
use crate::tools::algo::weak_components;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    /// Ascending, `m + 1` entries.
    pub values: Vec<f64>,
    pub m: usize,
    pub graph_hash: String,
    /// Ritz residual norms aligned with `values` (0 for analytic zeros).
    pub residuals: Vec<f64>,
    /// Operator applications used.
    pub matvecs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FingerprintConfig {
    pub m: usize,
    /// Residual bound per reported value; a Ritz value lies within this of an eigenvalue.
    pub tol: f64,
    /// Thick-restart cycles allowed per Lanczos run.
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self {
            m: 16,
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
        }
    }
}

pub fn fingerprint(g: &Graph, cfg: &FingerprintConfig) -> Result<Fingerprint, SttaError> {
    let n = g.node_count();
    let want = cfg.m + 1;
    if want > n {
        return Err(SttaError::Validation(format!("M + 1 = {want} exceeds node count {n}")));
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(SttaError::Validation("tol must be > 0 and max_iter >= 1".into()));
    }
    let op = LaplacianOperator::new(g);
    let sqrt_d = op.sqrt_degree();
    let nontrivial: Vec<Vec<usize>> = weak_components(g).into_iter().filter(|c| c.len() >= 2).collect();
    let zeros = nontrivial.len().min(want);
    let mut values = vec![0.0; zeros];
    let mut residuals = vec![0.0; zeros];
    let graph_hash = g.structural_hash();
    if zeros == want {
        return Ok(Fingerprint { values, m: cfg.m, graph_hash, residuals, matvecs: 0 });
    }
    let mut deflate: Vec<Vec<f64>> = nontrivial
        .iter()
        .map(|c| {
            let mut v = vec![0.0; n];
            let norm = c.iter().map(|&i| sqrt_d[i] * sqrt_d[i]).sum::<f64>().sqrt();
            for &i in c {
                v[i] = sqrt_d[i] / norm;
            }
            v
        })
        .collect();
    let nev = want - zeros;
    let mut solver = Solver { op: &op, rng: ChaCha8Rng::seed_from_u64(cfg.seed), matvecs: 0, tol: cfg.tol, max_restarts: cfg.max_iter };
    let mut found: Vec<(f64, f64)> = Vec::new();
    while found.len() < nev {
        let pairs = solver.top(&deflate, nev - found.len())?;
        if pairs.is_empty() {
            break;
        }
        for p in pairs {
            found.push((p.theta, p.residual));
            deflate.push(p.vector);
        }
    }
    // Probe the complement for eigenvalues the locked set skipped.
    for _ in 0..(4 * nev + 8) {
        if found.len() < nev {
            break;
        }
        let mut sorted: Vec<f64> = found.iter().map(|f| f.0).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let cutoff = sorted[nev - 1];
        let probe = solver.top(&deflate, 1)?;
        match probe.into_iter().next() {
            Some(p) if p.theta > cutoff + cfg.tol => {
                found.push((p.theta, p.residual));
                deflate.push(p.vector);
            }
            _ => break,
        }
    }
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    found.truncate(nev);
    for (theta, res) in found {
        values.push((2.0 - theta).clamp(0.0, 2.0));
        residuals.push(res);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(Fingerprint {
        values: order.iter().map(|&i| values[i]).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        m: cfg.m,
        graph_hash,
        matvecs: solver.matvecs,
    })
}

struct RitzPair {
    theta: f64,
    residual: f64,
    vector: Vec<f64>,
}

struct Solver<'a> {
    op: &'a LaplacianOperator,
    rng: ChaCha8Rng,
    matvecs: usize,
    tol: f64,
    max_restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes components along `basis` (assumed orthonormal), twice for stability.
fn orthogonalize(w: &mut [f64], deflate: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for d in deflate.iter().chain(basis) {
            let h = dot(d, w);
            axpy(-h, d, w);
        }
    }
}

/// Norm below which a vector is treated as having no new direction.
const BREAKDOWN: f64 = 1e-12;

impl Solver<'_> {
    fn apply_b(&mut self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = 2.0 * xi - *yi);
        self.matvecs += 1;
    }

    fn random_start(&mut self, deflate: &[Vec<f64>]) -> Option<Vec<f64>> {
        let n = self.op.dim();
        for _ in 0..3 {
            let mut v: Vec<f64> = (0..n).map(|_| self.rng.random::<f64>() - 0.5).collect();
            let before = norm(&v);
            orthogonalize(&mut v, deflate, &[]);
            let nv = norm(&v);
            if nv > 1e-8 * before {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    }

    /// Largest `need` eigenpairs of `B` on the complement of `deflate`.
    /// Returns fewer when the reachable invariant subspace is smaller.
    fn top(&mut self, deflate: &[Vec<f64>], need: usize) -> Result<Vec<RitzPair>, SttaError> {
        let n = self.op.dim();
        let room = n.saturating_sub(deflate.len());
        if room == 0 || need == 0 {
            return Ok(Vec::new());
        }
        let Some(start) = self.random_start(deflate) else {
            return Ok(Vec::new());
        };
        let m = room.min((2 * need + 20).max(40));
        let mut basis: Vec<Vec<f64>> = vec![start];
        let mut t = vec![vec![0.0; m]; m];
        let mut w = vec![0.0; n];
        let mut best: (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        for _ in 0..self.max_restarts {
            let mut j = basis.len() - 1;
            let mut beta;
            let mut residual_vec;
            let mut exhausted = false;
            loop {
                let vj = basis[j].clone();
                self.apply_b(&vj, &mut w);
                for _ in 0..2 {
                    for d in deflate {
                        let h = dot(d, &w);
                        axpy(-h, d, &mut w);
                    }
                    for (i, v) in basis.iter().enumerate() {
                        let h = dot(v, &w);
                        t[i][j] += h;
                        axpy(-h, v, &mut w);
                    }
                }
                beta = norm(&w);
                residual_vec = w.clone();
                if beta < BREAKDOWN {
                    exhausted = true;
                    break;
                }
                if j + 1 == m {
                    break;
                }
                basis.push(w.iter().map(|x| x / beta).collect());
                t[j + 1][j] = beta;
                j += 1;
            }
            let s = basis.len();
            // Mirror the upper triangle (Gram–Schmidt coefficients) into a symmetric matrix.
            let small: Vec<Vec<f64>> = (0..s).map(|r| (0..s).map(|c| t[r.min(c)][r.max(c)]).collect()).collect();
            let (theta, y) = sym_eigen(&small);
            let mut order: Vec<usize> = (0..s).collect();
            order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]));
            let res: Vec<f64> = order.iter().map(|&i| if exhausted { 0.0 } else { (beta * y[s - 1][i]).abs() }).collect();
            let wanted = need.min(s);
            let converged = exhausted || res[..wanted].iter().all(|&r| r <= self.tol);
            best = (order[..wanted].iter().map(|&i| theta[i]).collect(), res[..wanted].to_vec());
            let ritz = |i: usize| -> Vec<f64> {
                let mut x = vec![0.0; n];
                for (k, v) in basis.iter().enumerate() {
                    axpy(y[k][i], v, &mut x);
                }
                x
            };
            if converged {
                return Ok(order[..wanted]
                    .iter()
                    .zip(&res)
                    .map(|(&i, &r)| {
                        let mut v = ritz(i);
                        orthogonalize(&mut v, deflate, &[]);
                        let nv = norm(&v);
                        v.iter_mut().for_each(|x| *x /= nv);
                        RitzPair { theta: theta[i], residual: r, vector: v }
                    })
                    .collect());
            }
            // Thick restart: keep the leading Ritz vectors plus the residual direction.
            let keep = (need + need.max(8)).min(s - 1);
            let kept: Vec<Vec<f64>> = order[..keep].iter().map(|&i| ritz(i)).collect();
            for row in t.iter_mut() {
                row.iter_mut().for_each(|x| *x = 0.0);
            }
            for (k, &i) in order[..keep].iter().enumerate() {
                t[k][k] = theta[i];
            }
            basis = kept;
            let mut r = residual_vec;
            orthogonalize(&mut r, deflate, &basis);
            let nr = norm(&r);
            if nr < BREAKDOWN {
                // The kept vectors span an invariant subspace; fresh direction instead.
                let mut all = deflate.to_vec();
                all.extend(basis.iter().cloned());
                match self.random_start(&all) {
                    Some(v) => basis.push(v),
                    None => continue,
                }
            } else {
                basis.push(r.iter().map(|x| x / nr).collect());
            }
        }
        let max_residual = best.1.iter().copied().fold(0.0, f64::max);
        Err(SttaError::Unconverged {
            iterations: self.max_restarts,
            values: best.0.iter().map(|th| 2.0 - th).collect(),
            residuals: best.1,
            max_residual,
        })
    }
}

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix.
/// Returns eigenvalues and the eigenvector matrix (eigenvectors in columns).
pub(crate) fn sym_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}
