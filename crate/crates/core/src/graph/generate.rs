//! Seeded synthetic graph families.

use super::{FeatureMatrix, Graph};
use crate::error::GraphError;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamily {
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
    StochasticBlock { sizes: Vec<usize>, p_in: f64, p_out: f64 },
    Grid { rows: usize, cols: usize },
    Complete { n: usize },
    Path { n: usize },
}

/// A generator request. Directed variants of the deterministic families
/// orient every edge from the lower to the higher id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphGenSpec {
    #[serde(flatten)]
    pub family: GraphFamily,
    pub seed: u64,
    #[serde(default)]
    pub directed: bool,
    /// Inclusive integer range for uniformly drawn edge weights; unit weights when absent.
    #[serde(default)]
    pub weight_range: Option<(u32, u32)>,
    /// Number of uniform `[0, 1)` node feature columns.
    #[serde(default)]
    pub feature_columns: usize,
}

impl GraphGenSpec {
    pub fn new(family: GraphFamily, seed: u64) -> Self {
        Self {
            family,
            seed,
            directed: false,
            weight_range: None,
            feature_columns: 0,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::Validation(m));
        let prob = |p: f64, name: &str| -> Result<(), GraphError> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(GraphError::Validation(format!("{name} = {p} outside [0, 1]")))
            }
        };
        match &self.family {
            GraphFamily::ErdosRenyi { p, .. } => prob(*p, "p")?,
            GraphFamily::BarabasiAlbert { n, m } => {
                if *m == 0 || m >= n {
                    return bad(format!("barabasi-albert needs 1 <= m < n, got m={m}, n={n}"));
                }
            }
            GraphFamily::StochasticBlock { sizes, p_in, p_out } => {
                if sizes.is_empty() {
                    return bad("stochastic-block needs at least one block".into());
                }
                prob(*p_in, "p_in")?;
                prob(*p_out, "p_out")?;
            }
            GraphFamily::Grid { .. } | GraphFamily::Complete { .. } | GraphFamily::Path { .. } => {}
        }
        if let Some((lo, hi)) = self.weight_range {
            if lo > hi {
                return bad(format!("weight range [{lo}, {hi}] is empty"));
            }
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &GraphGenSpec) -> Result<Graph, GraphError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let directed = spec.directed;
    let (n, pairs) = match &spec.family {
        GraphFamily::ErdosRenyi { n, p } => (*n, erdos_renyi(*n, *p, directed, &mut rng)),
        GraphFamily::BarabasiAlbert { n, m } => (*n, barabasi_albert(*n, *m, &mut rng)),
        GraphFamily::StochasticBlock { sizes, p_in, p_out } => {
            let n = sizes.iter().sum();
            (n, stochastic_block(sizes, *p_in, *p_out, &mut rng))
        }
        GraphFamily::Grid { rows, cols } => {
            let mut pairs = Vec::new();
            for r in 0..*rows {
                for c in 0..*cols {
                    let v = r * cols + c;
                    if c + 1 < *cols {
                        pairs.push((v, v + 1));
                    }
                    if r + 1 < *rows {
                        pairs.push((v, v + cols));
                    }
                }
            }
            (rows * cols, pairs)
        }
        GraphFamily::Complete { n } => {
            let pairs = (0..*n).flat_map(|i| (i + 1..*n).map(move |j| (i, j))).collect();
            (*n, pairs)
        }
        GraphFamily::Path { n } => (*n, (1..*n).map(|i| (i - 1, i)).collect()),
    };
    let weighted: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(s, d)| {
            let w = match spec.weight_range {
                Some((lo, hi)) => f64::from(rng.random_range(lo..=hi)),
                None => 1.0,
            };
            (s, d, w)
        })
        .collect();
    let mut g = Graph::new(n, directed, weighted)?;
    if spec.feature_columns > 0 {
        let data = (0..n * spec.feature_columns).map(|_| rng.random::<f64>()).collect();
        g = g.with_features(FeatureMatrix::new(n, spec.feature_columns, data)?)?;
    }
    Ok(g)
}

/// G(n, p) by geometric skipping over the pair index space, O(n + m).
fn erdos_renyi(n: usize, p: f64, directed: bool, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if n < 2 || p <= 0.0 {
        return pairs;
    }
    let total: u64 = if directed {
        (n as u64) * (n as u64 - 1)
    } else {
        (n as u64) * (n as u64 - 1) / 2
    };
    let log_q = (1.0 - p).ln();
    let mut k: u64 = 0;
    let mut first = true;
    loop {
        let skip = if p >= 1.0 {
            0
        } else {
            let r: f64 = rng.random();
            ((1.0 - r).ln() / log_q).floor() as u64
        };
        k = if first { skip } else { k.saturating_add(skip + 1) };
        first = false;
        if k >= total {
            break;
        }
        pairs.push(if directed {
            let i = (k / (n as u64 - 1)) as usize;
            let j = (k % (n as u64 - 1)) as usize;
            (i, if j >= i { j + 1 } else { j })
        } else {
            unrank_pair(k)
        });
    }
    pairs
}

/// Maps a linear index over `{(i, j): i > j}` in row order to `(j, i)`.
fn unrank_pair(k: u64) -> (usize, usize) {
    let mut i = ((((8 * k + 1) as f64).sqrt() + 1.0) / 2.0).floor() as u64;
    while i * (i - 1) / 2 > k {
        i -= 1;
    }
    while (i + 1) * i / 2 <= k {
        i += 1;
    }
    let j = k - i * (i - 1) / 2;
    (j as usize, i as usize)
}

fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    // Seed with a star on nodes 0..=m.
    let mut pairs: Vec<(usize, usize)> = (1..=m).map(|v| (0, v)).collect();
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * n * m);
    for &(a, b) in &pairs {
        repeated.push(a);
        repeated.push(b);
    }
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = *repeated.choose(rng).expect("repeated list is nonempty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            pairs.push((t, v));
            repeated.push(t);
            repeated.push(v);
        }
    }
    pairs
}

fn stochastic_block(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    pairs
}
