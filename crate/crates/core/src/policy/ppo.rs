//! Generalized advantage estimation and the PPO-clip update.

use super::{accumulate_grad_log_prob, masked_softmax, sample_index, PolicyParams, ValueParams};
use crate::error::PolicyError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PpoConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub clip_eps: f64,
    pub lr: f64,
    pub value_lr: f64,
    /// Episodes collected per update.
    pub batch: usize,
    pub epochs: usize,
    pub kl_coeff: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            lambda: 0.95,
            clip_eps: 0.2,
            // Plain gradient ascent on a linear policy with unnormalized
            // rewards: 1e-3 barely moves the logits within a few hundred updates.
            lr: 0.05,
            value_lr: 0.05,
            batch: 8,
            epochs: 4,
            kl_coeff: 0.3,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let bad = |m: String| Err(PolicyError::Contract(m));
        for (name, v) in [("gamma", self.gamma), ("lambda", self.lambda)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, v) in [("clip_eps", self.clip_eps), ("lr", self.lr), ("value_lr", self.value_lr)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if !(self.kl_coeff.is_finite() && self.kl_coeff >= 0.0) {
            return bad(format!("kl_coeff must be finite and >= 0, got {}", self.kl_coeff));
        }
        if self.batch == 0 || self.epochs == 0 {
            return bad("batch and epochs must be >= 1".into());
        }
        Ok(())
    }
}

/// One decision with its behaviour-policy statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Concatenated policy input `[prompt ; features]`.
    pub x: Vec<f64>,
    /// Value-function features.
    pub features: Vec<f64>,
    pub mask: Vec<bool>,
    pub action: usize,
    pub old_logprob: f64,
    pub old_probs: Vec<f64>,
    pub advantage: f64,
    pub value_target: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub surrogate: f64,
    pub value_loss: f64,
    pub approx_kl: f64,
    pub diverged: bool,
}

/// `Â_t = Σ_l (γλ)^l δ_{t+l}` with `δ_t = r_t + γV(s_{t+1}) − V(s_t)`.
/// `values` has one more entry than `rewards` (the bootstrap value).
pub fn gae(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> Result<Vec<f64>, PolicyError> {
    if values.len() != rewards.len() + 1 {
        return Err(PolicyError::Contract(format!(
            "need {} values for {} rewards, got {}",
            rewards.len() + 1,
            rewards.len(),
            values.len()
        )));
    }
    let mut adv = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        let delta = rewards[t] + gamma * values[t + 1] - values[t];
        acc = delta + gamma * lambda * acc;
        adv[t] = acc;
    }
    Ok(adv)
}

fn probs_of(p: &PolicyParams, s: &Sample) -> Vec<f64> {
    masked_softmax(&p.logits(&s.x), &s.mask)
}

/// `KL(π_new ‖ π_old)` at one state, natural log.
pub fn kl_to_old(new: &[f64], old: &[f64]) -> f64 {
    new.iter()
        .zip(old)
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &q)| p * (p.ln() - q.ln()))
        .sum()
}

fn clipped_term(ratio: f64, adv: f64, eps: f64) -> f64 {
    (ratio * adv).min(ratio.clamp(1.0 - eps, 1.0 + eps) * adv)
}

/// Mean clipped surrogate over the batch.
pub fn ppo_surrogate(batch: &[Sample], p: &PolicyParams, clip_eps: f64) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    batch
        .iter()
        .map(|s| {
            let probs = probs_of(p, s);
            let ratio = (probs[s.action].ln() - s.old_logprob).exp();
            clipped_term(ratio, s.advantage, clip_eps)
        })
        .sum::<f64>()
        / batch.len() as f64
}

/// Surrogate minus `kl_coeff` times the mean KL to the behaviour policy.
pub fn ppo_objective(batch: &[Sample], p: &PolicyParams, clip_eps: f64, kl_coeff: f64) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    let kl: f64 = batch.iter().map(|s| kl_to_old(&probs_of(p, s), &s.old_probs)).sum::<f64>() / batch.len() as f64;
    ppo_surrogate(batch, p, clip_eps) - kl_coeff * kl
}

/// Analytic gradient of [`ppo_objective`] with respect to `theta`.
pub fn ppo_gradient(batch: &[Sample], p: &PolicyParams, clip_eps: f64, kl_coeff: f64) -> Vec<f64> {
    let mut g = vec![0.0; p.theta.len()];
    if batch.is_empty() {
        return g;
    }
    let inv_n = 1.0 / batch.len() as f64;
    let a_n = p.actions;
    for s in batch {
        let probs = probs_of(p, s);
        let ratio = (probs[s.action].ln() - s.old_logprob).exp();
        let adv = s.advantage;
        // The min picks the clipped branch (zero gradient) only when the ratio
        // has moved past the bound in the direction the advantage rewards.
        let clipped = (adv > 0.0 && ratio > 1.0 + clip_eps) || (adv < 0.0 && ratio < 1.0 - clip_eps);
        if !clipped && adv != 0.0 {
            accumulate_grad_log_prob(p, &s.x, &probs, s.action, adv * ratio * inv_n, &mut g);
        }
        if kl_coeff > 0.0 {
            // ∂KL/∂z_j = p_j (log p_j − log q_j − KL).
            let kl = kl_to_old(&probs, &s.old_probs);
            let dz: Vec<f64> = probs
                .iter()
                .zip(&s.old_probs)
                .map(|(&pj, &qj)| if pj > 0.0 { pj * (pj.ln() - qj.ln() - kl) } else { 0.0 })
                .collect();
            for (r, &xi) in s.x.iter().enumerate() {
                if xi == 0.0 {
                    continue;
                }
                let c = kl_coeff * inv_n * xi / p.temperature;
                for (gj, &d) in g[r * a_n..(r + 1) * a_n].iter_mut().zip(&dz) {
                    *gj -= c * d;
                }
            }
        }
    }
    g
}

fn value_loss(batch: &[Sample], v: &ValueParams) -> f64 {
    batch.iter().map(|s| (v.value(&s.features) - s.value_target).powi(2)).sum::<f64>() / (2.0 * batch.len() as f64)
}

/// `cfg.epochs` full-batch ascent steps on the KL-penalized surrogate and
/// descent steps on the value MSE. Non-finite results leave the inputs untouched.
pub fn ppo_update(
    batch: &[Sample],
    p: &PolicyParams,
    v: &ValueParams,
    cfg: &PpoConfig,
) -> Result<(PolicyParams, ValueParams, UpdateStats), PolicyError> {
    if batch.is_empty() {
        return Err(PolicyError::Contract("empty batch".into()));
    }
    let mut np = p.clone();
    let mut nv = v.clone();
    let inv_n = 1.0 / batch.len() as f64;
    for _ in 0..cfg.epochs {
        let g = ppo_gradient(batch, &np, cfg.clip_eps, cfg.kl_coeff);
        if g.iter().any(|x| !x.is_finite()) {
            return Ok((p.clone(), v.clone(), diverged(batch, p, v, cfg)));
        }
        np.theta.iter_mut().zip(&g).for_each(|(t, d)| *t += cfg.lr * d);
        let mut gw = vec![0.0; nv.omega.len()];
        let mut gb = 0.0;
        for s in batch {
            let r = nv.value(&s.features) - s.value_target;
            gb += r * inv_n;
            gw.iter_mut().zip(&s.features).for_each(|(w, x)| *w += r * x * inv_n);
        }
        nv.bias -= cfg.value_lr * gb;
        nv.omega.iter_mut().zip(&gw).for_each(|(w, d)| *w -= cfg.value_lr * d);
    }
    if !np.is_finite() || !nv.is_finite() {
        return Ok((p.clone(), v.clone(), diverged(batch, p, v, cfg)));
    }
    let approx_kl = batch.iter().map(|s| kl_to_old(&probs_of(&np, s), &s.old_probs)).sum::<f64>() * inv_n;
    let stats = UpdateStats {
        surrogate: ppo_surrogate(batch, &np, cfg.clip_eps),
        value_loss: value_loss(batch, &nv),
        approx_kl,
        diverged: false,
    };
    Ok((np, nv, stats))
}

fn diverged(batch: &[Sample], p: &PolicyParams, v: &ValueParams, cfg: &PpoConfig) -> UpdateStats {
    UpdateStats {
        surrogate: ppo_surrogate(batch, p, cfg.clip_eps),
        value_loss: value_loss(batch, v),
        approx_kl: 0.0,
        diverged: true,
    }
}

/// Sanity problem for the learner: a single-state bandit with deterministic
/// arm rewards.
/// Each update draws `cfg.batch` pulls, uses a learned constant baseline, and
/// applies [`ppo_update`]. Returns the probability of the best arm after
/// every update.
pub fn bandit_curve(rewards: &[f64], cfg: &PpoConfig, updates: usize, seed: u64) -> Result<Vec<f64>, PolicyError> {
    cfg.validate()?;
    if rewards.len() < 2 || rewards.iter().any(|r| !r.is_finite()) {
        return Err(PolicyError::Contract("need at least two finite arm rewards".into()));
    }
    let best = (0..rewards.len()).fold(0, |b, i| if rewards[i] > rewards[b] { i } else { b });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = PolicyParams::zeros(0, 1, rewards.len());
    let mut v = ValueParams::zeros(1);
    let x = vec![1.0];
    let mask = vec![true; rewards.len()];
    let mut curve = Vec::with_capacity(updates);
    for _ in 0..updates {
        let probs = masked_softmax(&p.logits(&x), &mask);
        let baseline = v.value(&x);
        let batch: Vec<Sample> = (0..cfg.batch)
            .map(|_| {
                let a = sample_index(&probs, &mut rng);
                let r = rewards[a];
                Sample {
                    x: x.clone(),
                    features: x.clone(),
                    mask: mask.clone(),
                    action: a,
                    old_logprob: probs[a].ln(),
                    old_probs: probs.clone(),
                    advantage: r - baseline,
                    value_target: r,
                }
            })
            .collect();
        let (np, nv, _) = ppo_update(&batch, &p, &v, cfg)?;
        p = np;
        v = nv;
        curve.push(masked_softmax(&p.logits(&x), &mask)[best]);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gae_examples() {
        assert_eq!(gae(&[1.0, 1.0], &[0.0; 3], 1.0, 1.0).unwrap(), vec![2.0, 1.0]);
        // δ = [0.5, −0.2] with V ≡ 0.
        let a = gae(&[0.5, -0.2], &[0.0; 3], 0.99, 0.95).unwrap();
        assert!((a[0] - 0.3119).abs() < 1e-12);
        let d = gae(&[0.5, -0.2], &[0.1, 0.3, 0.0], 0.9, 0.0).unwrap();
        assert!((d[0] - (0.5 + 0.9 * 0.3 - 0.1)).abs() < 1e-15);
        assert!(gae(&[1.0], &[0.0], 0.9, 0.9).is_err());
    }

    fn one_state(ratio_target: f64, adv: f64) -> (Vec<Sample>, PolicyParams) {
        // Two actions, one input; choose old_logprob so the current ratio is `ratio_target`.
        let p = PolicyParams::zeros(0, 1, 2);
        let s = Sample {
            x: vec![1.0],
            features: vec![1.0],
            mask: vec![true, true],
            action: 0,
            old_logprob: (0.5f64).ln() - ratio_target.ln(),
            old_probs: vec![0.5, 0.5],
            advantage: adv,
            value_target: 0.0,
        };
        (vec![s], p)
    }

    #[test]
    fn surrogate_examples() {
        let (b, p) = one_state(1.0, 2.0);
        assert!((ppo_surrogate(&b, &p, 0.2) - 2.0).abs() < 1e-12);
        let (b, p) = one_state(1.5, 1.0);
        assert!((ppo_surrogate(&b, &p, 0.2) - 1.2).abs() < 1e-12);
        let (b, p) = one_state(0.5, -1.0);
        assert!((ppo_surrogate(&b, &p, 0.2) + 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_advantage_leaves_theta() {
        let (b, p) = one_state(1.0, 0.0);
        let cfg = PpoConfig { kl_coeff: 0.0, ..Default::default() };
        let (np, _, st) = ppo_update(&b, &p, &ValueParams::zeros(1), &cfg).unwrap();
        assert_eq!(np.theta, p.theta);
        assert!(!st.diverged);
        assert!(ppo_update(&[], &p, &ValueParams::zeros(1), &cfg).is_err());
    }
}
