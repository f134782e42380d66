//! Random joint tables that factor as `p(y, ir, x) · p(m | x)`.
#![allow(dead_code)]

use graphdistill::diagnostics::JointTable;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn simplex(rng: &mut ChaCha8Rng, k: usize, sparse: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| if sparse && rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Variables `y, ir, x, m` (last fastest) with `m` depending on `x` only.
/// Some cells are zero so conditioning on empty events gets exercised.
pub fn random_markov_table(rng: &mut ChaCha8Rng) -> JointTable {
    let sizes = [rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(2..=4), rng.random_range(2..=4)];
    let [ny, nr, nx, nm] = sizes;
    let head = simplex(rng, ny * nr * nx, true);
    let channel: Vec<Vec<f64>> = (0..nx).map(|_| simplex(rng, nm, true)).collect();
    let mut probs = Vec::with_capacity(head.len() * nm);
    for (i, &p) in head.iter().enumerate() {
        let x = i % nx;
        probs.extend(channel[x].iter().map(|c| p * c));
    }
    JointTable::from_weights(&["y", "ir", "x", "m"], &sizes, probs).expect("valid table")
}
