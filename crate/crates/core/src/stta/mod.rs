//! Structure-aware test-time adaptation.
//!
//! A spectral fingerprint of the test graph feeds a small adapter whose output
//! is the prompt block of the frozen policy's input. Only the adapter is
//! trained, by REINFORCE on `w_L·N + w_KL·Σ_t KL(π_ψ ‖ π_orig)` over rollouts
//! on auxiliary queries generated for that graph.

mod adapter;
mod fingerprint;

pub use adapter::AdapterParams;
pub use fingerprint::{fingerprint, Fingerprint, FingerprintConfig};

use crate::distill::Scorer;
use crate::env::{run_episode, sample_queries, EnvConfig, Query, Trajectory};
use crate::error::SttaError;
use crate::graph::Graph;
use crate::policy::{masked_softmax, params_digest, parallel_map, ActionSpace, LinearPolicy, PolicyParams, ValueParams};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SttaConfig {
    pub w_l: f64,
    pub w_kl: f64,
    /// Auxiliary queries per adaptation run.
    pub k: usize,
    /// Rollouts per auxiliary query and step.
    pub r: usize,
    pub lr: f64,
    pub steps: usize,
    pub seed: u64,
    pub hidden: usize,
    pub prompt_len: usize,
    pub prompt_width: usize,
    pub fingerprint: FingerprintConfig,
}

impl Default for SttaConfig {
    fn default() -> Self {
        Self {
            w_l: 1.0,
            w_kl: 0.1,
            k: 5,
            r: 3,
            lr: 0.01,
            steps: 40,
            seed: 0,
            hidden: 32,
            prompt_len: 4,
            prompt_width: 8,
            fingerprint: FingerprintConfig::default(),
        }
    }
}

impl SttaConfig {
    pub fn validate(&self) -> Result<(), SttaError> {
        let bad = |m: &str| Err(SttaError::Validation(m.to_string()));
        if self.k == 0 || self.r == 0 {
            return bad("k and r must be >= 1");
        }
        if !(self.w_l.is_finite() && self.w_l >= 0.0 && self.w_kl.is_finite() && self.w_kl >= 0.0) {
            return bad("w_l and w_kl must be finite and >= 0");
        }
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return bad("lr must be finite and >= 0");
        }
        if self.hidden == 0 || self.prompt_len * self.prompt_width == 0 {
            return bad("adapter sizes must be >= 1");
        }
        Ok(())
    }

    pub fn prompt_dim(&self) -> usize {
        self.prompt_len * self.prompt_width
    }

    /// Adapter with a random hidden layer and a zero output layer.
    pub fn initial_adapter(&self) -> AdapterParams {
        AdapterParams::init(self.fingerprint.m + 1, self.hidden, self.prompt_len, self.prompt_width, self.seed ^ 0xada9)
    }
}

/// `Σ p·ln(p/q)` in nats.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64, SttaError> {
    if p.len() != q.len() {
        return Err(SttaError::Dimension(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let mut kl = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(SttaError::Validation(format!("q[{i}] = {qi} where p[{i}] = {pi} > 0")));
            }
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl.max(0.0))
}

/// `K` auxiliary queries for `g`; fewer (with a warning) when templates are unsatisfiable.
pub fn generate_aux_queries(g: &Graph, k: usize, seed: u64) -> Result<Vec<Query>, SttaError> {
    Ok(sample_queries(g, k, seed)?)
}

/// Mean of `w_L·N + w_KL·Σ_t KL_t` over trajectories.
pub fn stta_loss(trajs: &[(Trajectory, Vec<f64>)], cfg: &SttaConfig) -> f64 {
    if trajs.is_empty() {
        return 0.0;
    }
    trajs.iter().map(|(t, kl)| episode_loss(t.len(), kl, cfg)).sum::<f64>() / trajs.len() as f64
}

fn episode_loss(n: usize, kl: &[f64], cfg: &SttaConfig) -> f64 {
    cfg.w_l * n as f64 + cfg.w_kl * kl.iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptRow {
    pub step: usize,
    pub loss: f64,
    pub mean_n: f64,
    pub mean_kl: f64,
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct AdaptOutput {
    pub adapter: AdapterParams,
    pub curve: Vec<AdaptRow>,
    pub queries: Vec<Query>,
    pub policy_digest_before: String,
    pub policy_digest_after: String,
}

/// One rollout's contribution: trajectory, per-step KL to the unprompted
/// policy, `Σ_t ∂ log π(a_t|s_t)/∂prompt`, and `Σ_t ∂ KL_t/∂prompt`.
struct Rollout {
    traj: Trajectory,
    kl: Vec<f64>,
    score: Vec<f64>,
    kl_grad: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn rollout(
    space: &ActionSpace,
    policy: &PolicyParams,
    prompt: &[f64],
    g: &Arc<Graph>,
    q: &Arc<Query>,
    env: &EnvConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<Rollout, SttaError> {
    let mut pol = LinearPolicy::new(space, policy, prompt.to_vec(), env.n_max)?;
    let traj = run_episode(&mut pol, g.clone(), q.clone(), env, scorer, seed)?;
    let zero = vec![0.0; policy.prompt_dim];
    let mut kl = Vec::with_capacity(pol.decisions.len());
    let mut score = vec![0.0; policy.prompt_dim];
    let mut kl_grad = vec![0.0; policy.prompt_dim];
    for d in &pol.decisions {
        let x0 = policy.input(&d.features, &zero)?;
        let orig = masked_softmax(&policy.logits(&x0), &d.mask);
        kl.push(kl_divergence(&d.probs, &orig)?);
        score.iter_mut().zip(prompt_score(policy, &d.probs, d.action)).for_each(|(s, v)| *s += v);
        kl_grad.iter_mut().zip(kl_prompt_grad(policy, &d.probs, &orig)).for_each(|(s, v)| *s += v);
    }
    Ok(Rollout { traj, kl, score, kl_grad })
}

/// `∂ log π(a) / ∂prompt`: the prompt occupies the first `prompt_dim` input
/// rows, so entry `r` is `Σ_j θ[r, j] (e_a − π)_j / T`.
pub fn prompt_score(policy: &PolicyParams, probs: &[f64], action: usize) -> Vec<f64> {
    let a_n = policy.actions;
    (0..policy.prompt_dim)
        .map(|r| {
            let row = &policy.theta[r * a_n..(r + 1) * a_n];
            let v: f64 = row
                .iter()
                .zip(probs)
                .enumerate()
                .map(|(j, (t, p))| t * (f64::from(u8::from(j == action)) - p))
                .sum();
            v / policy.temperature
        })
        .collect()
}

/// `∂ KL(π ‖ q) / ∂prompt` with `q` fixed: the logit gradient is
/// `π_j (ln(π_j / q_j) − KL)`, pulled back through the prompt rows of θ.
pub fn kl_prompt_grad(policy: &PolicyParams, probs: &[f64], orig: &[f64]) -> Vec<f64> {
    let kl: f64 = probs.iter().zip(orig).filter(|(p, _)| **p > 0.0).map(|(p, q)| p * (p / q).ln()).sum();
    let dz: Vec<f64> = probs
        .iter()
        .zip(orig)
        .map(|(&p, &q)| if p > 0.0 { p * ((p / q).ln() - kl) } else { 0.0 })
        .collect();
    let a_n = policy.actions;
    (0..policy.prompt_dim)
        .map(|r| policy.theta[r * a_n..(r + 1) * a_n].iter().zip(&dz).map(|(t, g)| t * g).sum::<f64>() / policy.temperature)
        .collect()
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over a simple combination.
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn policy_digest(p: &PolicyParams) -> String {
    params_digest(p, &ValueParams::zeros(0))
}

/// REINFORCE on the adapter with a batch-mean baseline, plus the pathwise
/// derivative of the KL term, which depends on the prompt directly. The
/// auxiliary queries are drawn once and reused at every step; `policy` is read-only.
#[allow(clippy::too_many_arguments)]
pub fn adapt(
    psi0: &AdapterParams,
    g: Arc<Graph>,
    z: &Fingerprint,
    policy: &PolicyParams,
    env: &EnvConfig,
    scorer: &Scorer,
    cfg: &SttaConfig,
    mut hook: Option<&mut dyn FnMut(&AdaptRow)>,
) -> Result<AdaptOutput, SttaError> {
    cfg.validate()?;
    if psi0.output_dim() != policy.prompt_dim {
        return Err(SttaError::Dimension(format!(
            "adapter emits {} prompt values, policy expects {}",
            psi0.output_dim(),
            policy.prompt_dim
        )));
    }
    psi0.forward(&z.values)?;
    let before = policy_digest(policy);
    let queries: Vec<Arc<Query>> = generate_aux_queries(&g, cfg.k, cfg.seed)?.into_iter().map(Arc::new).collect();
    let space = ActionSpace::standard();
    let mut psi = psi0.clone();
    let mut lr = cfg.lr;
    let mut halved = false;
    let mut curve = Vec::with_capacity(cfg.steps);
    let jobs: Vec<(usize, usize)> = (0..queries.len()).flat_map(|q| (0..cfg.r).map(move |r| (q, r))).collect();
    for step in 0..cfg.steps {
        let prompt = psi.forward(&z.values)?;
        let results = parallel_map(&jobs, |&(qi, r)| {
            let seed = mix(cfg.seed, step as u64, (qi * cfg.r + r) as u64);
            rollout(&space, policy, &prompt, &g, &queries[qi], env, scorer, seed)
        });
        let results: Vec<Rollout> = results.into_iter().collect::<Result<_, _>>()?;
        let losses: Vec<f64> = results.iter().map(|r| episode_loss(r.traj.len(), &r.kl, cfg)).collect();
        let count = losses.len() as f64;
        let baseline = losses.iter().sum::<f64>() / count;
        let mut g_prompt = vec![0.0; prompt.len()];
        for (r, l) in results.iter().zip(&losses) {
            let c = (l - baseline) / count;
            g_prompt.iter_mut().zip(&r.score).for_each(|(g, s)| *g += c * s);
            g_prompt.iter_mut().zip(&r.kl_grad).for_each(|(g, k)| *g += cfg.w_kl * k / count);
        }
        let grad = psi.vjp(&z.values, &g_prompt)?;
        let row = AdaptRow {
            step,
            loss: baseline,
            mean_n: results.iter().map(|r| r.traj.len() as f64).sum::<f64>() / count,
            mean_kl: results.iter().map(|r| r.kl.iter().sum::<f64>()).sum::<f64>() / count,
            lr,
        };
        let mut next = psi.clone();
        let flat: Vec<f64> = next.flat().iter().zip(&grad).map(|(p, d)| p - lr * d).collect();
        next.set_flat(&flat);
        let ok = baseline.is_finite() && next.is_finite() && next.flat().iter().all(|v| v.abs() < 1e6);
        if !ok {
            if halved {
                return Err(SttaError::Diverged(format!("step {step} diverged again after halving lr to {lr}")));
            }
            log::warn!("adaptation step {step} diverged; reverting and halving lr");
            halved = true;
            lr *= 0.5;
        } else {
            psi = next;
        }
        if let Some(h) = hook.as_mut() {
            h(&row);
        }
        curve.push(row);
    }
    let after = policy_digest(policy);
    assert_eq!(before, after, "base policy changed during adaptation");
    Ok(AdaptOutput {
        adapter: psi,
        curve,
        queries: queries.iter().map(|q| (**q).clone()).collect(),
        policy_digest_before: before,
        policy_digest_after: after,
    })
}

/// Mean chain length over `rollouts` sampled episodes per query with a fixed prompt.
#[allow(clippy::too_many_arguments)]
pub fn mean_chain_length(
    policy: &PolicyParams,
    prompt: &[f64],
    g: &Arc<Graph>,
    queries: &[Query],
    rollouts: usize,
    env: &EnvConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<f64, SttaError> {
    if queries.is_empty() || rollouts == 0 {
        return Err(SttaError::Validation("need queries and rollouts".into()));
    }
    let space = ActionSpace::standard();
    let qs: Vec<Arc<Query>> = queries.iter().cloned().map(Arc::new).collect();
    let jobs: Vec<(usize, usize)> = (0..qs.len()).flat_map(|q| (0..rollouts).map(move |r| (q, r))).collect();
    let lens = parallel_map(&jobs, |&(qi, r)| -> Result<usize, SttaError> {
        let mut pol = LinearPolicy::new(&space, policy, prompt.to_vec(), env.n_max)?;
        Ok(run_episode(&mut pol, g.clone(), qs[qi].clone(), env, scorer, mix(seed, qi as u64, r as u64))?.len())
    });
    let mut total = 0usize;
    for l in lens {
        total += l?;
    }
    Ok(total as f64 / jobs.len() as f64)
}

/// JSON file of fingerprints keyed by graph hash and `M`.
#[derive(Debug)]
pub struct FingerprintCache {
    path: PathBuf,
    entries: BTreeMap<String, Fingerprint>,
}

impl FingerprintCache {
    pub fn open(path: &Path) -> Result<Self, SttaError> {
        let entries = match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| SttaError::Validation(format!("cache {}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(SttaError::Validation(format!("cache {}: {e}", path.display()))),
        };
        Ok(Self { path: path.to_path_buf(), entries })
    }

    fn key(hash: &str, m: usize) -> String {
        format!("{hash}:{m}")
    }

    pub fn get(&self, hash: &str, m: usize) -> Option<&Fingerprint> {
        self.entries.get(&Self::key(hash, m))
    }

    /// Cached value when present, otherwise computes, stores, and persists it.
    pub fn get_or_compute(&mut self, g: &Graph, cfg: &FingerprintConfig) -> Result<Fingerprint, SttaError> {
        let key = Self::key(&g.structural_hash(), cfg.m);
        if let Some(f) = self.entries.get(&key) {
            return Ok(f.clone());
        }
        let f = fingerprint(g, cfg)?;
        self.entries.insert(key, f.clone());
        let text = serde_json::to_string_pretty(&self.entries).expect("fingerprints serialize");
        std::fs::write(&self.path, text).map_err(|e| SttaError::Validation(format!("cache {}: {e}", self.path.display())))?;
        Ok(f)
    }
}
