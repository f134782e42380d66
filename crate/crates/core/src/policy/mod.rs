//! Linear-softmax policy and linear value function with GAE and PPO-clip.
//!
//! Logits are `θᵀ[prompt ; φ(s)] / T` over a fixed [`ActionSpace`]; masked
//! entries get probability zero. Gradients are analytic:
//! `∇_θ log π(a|s) = x ⊗ (e_a − π) / T`.

mod checkpoint;
mod ppo;
mod space;
mod train;

pub use checkpoint::{params_digest, Checkpoint, Tensor};
pub use ppo::{bandit_curve, gae, kl_to_old, ppo_gradient, ppo_objective, ppo_surrogate, ppo_update, PpoConfig, Sample, UpdateStats};
pub use space::{state_features, ActionEntry, ActionSpace, ColumnSlot, Slot, FEATURE_DIM};
pub use train::{build_tasks, evaluate, rollout, train, CurveRow, EvalSummary, Task, TrainConfig, TrainOutput};
pub(crate) use train::parallel_map;

use crate::env::{Action, ActionSampler, EnvState};
use crate::error::PolicyError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `theta` is row-major `(prompt_dim + feature_dim) × actions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub theta: Vec<f64>,
    pub prompt_dim: usize,
    pub feature_dim: usize,
    pub actions: usize,
    pub temperature: f64,
}

impl PolicyParams {
    pub fn zeros(prompt_dim: usize, feature_dim: usize, actions: usize) -> Self {
        Self {
            theta: vec![0.0; (prompt_dim + feature_dim) * actions],
            prompt_dim,
            feature_dim,
            actions,
            temperature: 1.0,
        }
    }

    /// Gaussian-ish init from a seeded uniform sum: state rows with scale
    /// `feature_scale`, prompt rows with `prompt_scale`.
    pub fn random(prompt_dim: usize, feature_dim: usize, actions: usize, feature_scale: f64, prompt_scale: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(prompt_dim, feature_dim, actions);
        for r in 0..p.rows() {
            let scale = if r < prompt_dim { prompt_scale } else { feature_scale };
            for a in 0..actions {
                // Sum of 12 uniforms minus 6 has unit variance.
                let z: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
                p.theta[r * actions + a] = scale * z;
            }
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.prompt_dim + self.feature_dim
    }

    pub fn is_finite(&self) -> bool {
        self.temperature.is_finite() && self.temperature > 0.0 && self.theta.iter().all(|v| v.is_finite())
    }

    /// Concatenated input `[prompt ; features]`.
    pub fn input(&self, features: &[f64], prompt: &[f64]) -> Result<Vec<f64>, PolicyError> {
        if features.len() != self.feature_dim || prompt.len() != self.prompt_dim {
            return Err(PolicyError::Dimension(format!(
                "expected prompt {} + features {}, got {} + {}",
                self.prompt_dim,
                self.feature_dim,
                prompt.len(),
                features.len()
            )));
        }
        let mut x = Vec::with_capacity(self.rows());
        x.extend_from_slice(prompt);
        x.extend_from_slice(features);
        Ok(x)
    }

    /// `θᵀx / T` for a concatenated input.
    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.actions];
        for (r, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.theta[r * self.actions..(r + 1) * self.actions];
            for (zj, &t) in z.iter_mut().zip(row) {
                *zj += xi * t;
            }
        }
        z.iter_mut().for_each(|v| *v /= self.temperature);
        z
    }
}

/// Softmax over valid entries of `z`; invalid entries get exactly 0.
pub fn masked_softmax(z: &[f64], mask: &[bool]) -> Vec<f64> {
    let max = z
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&v, _)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = z.iter().zip(mask).map(|(&v, &m)| if m { (v - max).exp() } else { 0.0 }).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

/// Action distribution for one state.
pub fn policy_probs(p: &PolicyParams, features: &[f64], prompt: &[f64], mask: &[bool]) -> Result<Vec<f64>, PolicyError> {
    if mask.len() != p.actions {
        return Err(PolicyError::Dimension(format!("mask has {} entries, policy has {} actions", mask.len(), p.actions)));
    }
    if !mask.iter().any(|&m| m) {
        return Err(PolicyError::Contract("mask admits no action".into()));
    }
    let x = p.input(features, prompt)?;
    Ok(masked_softmax(&p.logits(&x), mask))
}

/// `∂ log π(a|x) / ∂θ`, row-major like `theta`.
pub fn grad_log_prob(p: &PolicyParams, x: &[f64], probs: &[f64], action: usize) -> Vec<f64> {
    let mut g = vec![0.0; p.theta.len()];
    accumulate_grad_log_prob(p, x, probs, action, 1.0, &mut g);
    g
}

/// `g += scale · ∂ log π(a|x)/∂θ`.
pub(crate) fn accumulate_grad_log_prob(p: &PolicyParams, x: &[f64], probs: &[f64], action: usize, scale: f64, g: &mut [f64]) {
    let a_n = p.actions;
    for (r, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let c = scale * xi / p.temperature;
        let row = &mut g[r * a_n..(r + 1) * a_n];
        for (j, gj) in row.iter_mut().enumerate() {
            let e = if j == action { 1.0 } else { 0.0 };
            *gj += c * (e - probs[j]);
        }
    }
}

/// Draws an index from `probs` by inverse CDF.
pub fn sample_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueParams {
    pub omega: Vec<f64>,
    pub bias: f64,
}

impl ValueParams {
    pub fn zeros(feature_dim: usize) -> Self {
        Self { omega: vec![0.0; feature_dim], bias: 0.0 }
    }

    pub fn value(&self, features: &[f64]) -> f64 {
        self.bias + self.omega.iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.omega.iter().all(|v| v.is_finite())
    }
}

/// One decision made by a [`LinearPolicy`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub features: Vec<f64>,
    pub mask: Vec<bool>,
    pub action: usize,
    pub probs: Vec<f64>,
}

/// Samples actions from a linear-softmax policy, recording each decision.
pub struct LinearPolicy<'a> {
    pub space: &'a ActionSpace,
    pub params: &'a PolicyParams,
    pub prompt: Vec<f64>,
    pub n_max: usize,
    /// Take the argmax instead of sampling.
    pub greedy: bool,
    /// Overrides `params.temperature` when set.
    pub temperature: Option<f64>,
    pub decisions: Vec<Decision>,
}

impl<'a> LinearPolicy<'a> {
    pub fn new(space: &'a ActionSpace, params: &'a PolicyParams, prompt: Vec<f64>, n_max: usize) -> Result<Self, PolicyError> {
        if params.actions != space.len() || params.feature_dim != FEATURE_DIM || prompt.len() != params.prompt_dim {
            return Err(PolicyError::Dimension(format!(
                "policy is {}x{} (prompt {}), action space has {} entries, features {}, prompt {}",
                params.rows(),
                params.actions,
                params.prompt_dim,
                space.len(),
                FEATURE_DIM,
                prompt.len()
            )));
        }
        Ok(Self {
            space,
            params,
            prompt,
            n_max,
            greedy: false,
            temperature: None,
            decisions: Vec::new(),
        })
    }

    /// Distribution and mask at `s`.
    pub fn distribution(&self, s: &EnvState) -> (Vec<f64>, Vec<bool>, Vec<f64>) {
        let features = state_features(s);
        let mask = self.space.mask(s, self.n_max);
        let x = self.params.input(&features, &self.prompt).expect("dimensions checked at construction");
        let mut z = self.params.logits(&x);
        if let Some(t) = self.temperature {
            let k = self.params.temperature / t;
            z.iter_mut().for_each(|v| *v *= k);
        }
        (masked_softmax(&z, &mask), mask, features)
    }
}

impl ActionSampler for LinearPolicy<'_> {
    fn select(&mut self, s: &EnvState, rng: &mut ChaCha8Rng) -> Action {
        let (probs, mask, features) = self.distribution(s);
        let action = if self.greedy {
            (0..probs.len()).max_by(|&a, &b| probs[a].total_cmp(&probs[b]).then(b.cmp(&a))).unwrap_or(0)
        } else {
            sample_index(&probs, rng)
        };
        let resolved = self.space.resolve(action, s).unwrap_or(Action::Terminate);
        self.decisions.push(Decision { features, mask, action, probs });
        resolved
    }

    fn begin_episode(&mut self) {
        self.decisions.clear();
    }
}
