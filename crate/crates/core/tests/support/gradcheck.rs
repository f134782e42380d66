//! Central finite differences for the PPO objective on random instances.
#![allow(dead_code)]

use graphdistill::policy::{masked_softmax, ppo_gradient, ppo_objective, PolicyParams, Sample};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub batch: Vec<Sample>,
    pub params: PolicyParams,
    pub clip: f64,
    pub kl: f64,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0
}

/// A random batch whose behaviour policy is a perturbation of the current
/// one, so ratios land on both sides of the clip range. Instances with a
/// ratio within `1e-3` of a kink are redrawn: the objective has no
/// derivative there.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    loop {
        let actions = rng.random_range(2..=6);
        let dim = rng.random_range(1..=5);
        let mut params = PolicyParams::zeros(0, dim, actions);
        params.temperature = rng.random_range(0.5..2.0);
        params.theta.iter_mut().for_each(|t| *t = 0.5 * gauss(rng));
        let mut old = params.clone();
        old.theta.iter_mut().for_each(|t| *t += 0.3 * gauss(rng));
        let clip = 0.2;
        let kl = if rng.random::<bool>() { 0.3 } else { 0.0 };
        let mut near_kink = false;
        let batch: Vec<Sample> = (0..rng.random_range(1..=8))
            .map(|_| {
                let x: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
                let mut mask: Vec<bool> = (0..actions).map(|_| rng.random::<f64>() < 0.75).collect();
                let a = rng.random_range(0..actions);
                mask[a] = true;
                let old_probs = masked_softmax(&old.logits(&x), &mask);
                let new_probs = masked_softmax(&params.logits(&x), &mask);
                let ratio = new_probs[a] / old_probs[a];
                near_kink |= (ratio - 1.0 - clip).abs() < 1e-3 || (ratio - 1.0 + clip).abs() < 1e-3;
                Sample {
                    features: x.clone(),
                    x,
                    mask,
                    action: a,
                    old_logprob: old_probs[a].ln(),
                    old_probs,
                    advantage: 2.0 * gauss(rng),
                    value_target: 0.0,
                }
            })
            .collect();
        if !near_kink {
            return Instance { batch, params, clip, kl };
        }
    }
}

/// Max |analytic − central difference| over every coordinate of `theta`.
pub fn max_fd_error(inst: &Instance, h: f64) -> f64 {
    let g = ppo_gradient(&inst.batch, &inst.params, inst.clip, inst.kl);
    let mut p = inst.params.clone();
    let mut worst: f64 = 0.0;
    for i in 0..p.theta.len() {
        let t = p.theta[i];
        p.theta[i] = t + h;
        let up = ppo_objective(&inst.batch, &p, inst.clip, inst.kl);
        p.theta[i] = t - h;
        let down = ppo_objective(&inst.batch, &p, inst.clip, inst.kl);
        p.theta[i] = t;
        worst = worst.max((g[i] - (up - down) / (2.0 * h)).abs());
    }
    worst
}
