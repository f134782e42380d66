//! Two-layer adapter mapping a fingerprint to a prompt vector.

use crate::error::SttaError;
use crate::policy::Checkpoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `prompt = tanh(z·W1 + b1)·W2 + b2`, matrices row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterParams {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    /// Fingerprint length `M + 1`.
    pub input_dim: usize,
    pub hidden: usize,
    pub prompt_len: usize,
    pub prompt_width: usize,
}

impl AdapterParams {
    pub fn zeros(input_dim: usize, hidden: usize, prompt_len: usize, prompt_width: usize) -> Self {
        let out = prompt_len * prompt_width;
        Self {
            w1: vec![0.0; input_dim * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * out],
            b2: vec![0.0; out],
            input_dim,
            hidden,
            prompt_len,
            prompt_width,
        }
    }

    /// Random first layer, zero output layer: the initial prompt is exactly zero
    /// while every parameter still receives gradient.
    pub fn init(input_dim: usize, hidden: usize, prompt_len: usize, prompt_width: usize, seed: u64) -> Self {
        let mut p = Self::zeros(input_dim, hidden, prompt_len, prompt_width);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (input_dim as f64).sqrt();
        for w in p.w1.iter_mut().chain(p.b1.iter_mut()) {
            *w = scale * (2.0 * rng.random::<f64>() - 1.0);
        }
        p
    }

    pub fn output_dim(&self) -> usize {
        self.prompt_len * self.prompt_width
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn is_finite(&self) -> bool {
        self.flat().iter().all(|v| v.is_finite())
    }

    /// Parameters in the order `W1, b1, W2, b2`.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        v.extend(&self.w1);
        v.extend(&self.b1);
        v.extend(&self.w2);
        v.extend(&self.b2);
        v
    }

    pub fn set_flat(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.param_count(), "flat parameter length");
        let (a, rest) = v.split_at(self.w1.len());
        let (b, rest) = rest.split_at(self.b1.len());
        let (c, d) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(a);
        self.b1.copy_from_slice(b);
        self.w2.copy_from_slice(c);
        self.b2.copy_from_slice(d);
    }

    fn check_input(&self, z: &[f64]) -> Result<(), SttaError> {
        if z.len() != self.input_dim {
            return Err(SttaError::Dimension(format!("adapter expects {} fingerprint values, got {}", self.input_dim, z.len())));
        }
        Ok(())
    }

    fn hidden_activations(&self, z: &[f64]) -> Vec<f64> {
        (0..self.hidden)
            .map(|h| {
                let u = self.b1[h] + z.iter().enumerate().map(|(i, zi)| zi * self.w1[i * self.hidden + h]).sum::<f64>();
                u.tanh()
            })
            .collect()
    }

    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>, SttaError> {
        self.check_input(z)?;
        let a = self.hidden_activations(z);
        let out = self.output_dim();
        Ok((0..out)
            .map(|k| self.b2[k] + a.iter().enumerate().map(|(h, ah)| ah * self.w2[h * out + k]).sum::<f64>())
            .collect())
    }

    /// `Σ_k g_k · ∂prompt_k/∂ψ`, flattened like [`flat`](Self::flat).
    pub fn vjp(&self, z: &[f64], g: &[f64]) -> Result<Vec<f64>, SttaError> {
        self.check_input(z)?;
        let out = self.output_dim();
        if g.len() != out {
            return Err(SttaError::Dimension(format!("cotangent has {} entries, prompt has {out}", g.len())));
        }
        let a = self.hidden_activations(z);
        let mut dw1 = vec![0.0; self.w1.len()];
        let mut db1 = vec![0.0; self.hidden];
        let mut dw2 = vec![0.0; self.w2.len()];
        for h in 0..self.hidden {
            let row = &self.w2[h * out..(h + 1) * out];
            let back: f64 = row.iter().zip(g).map(|(w, gk)| w * gk).sum();
            for (k, gk) in g.iter().enumerate() {
                dw2[h * out + k] = a[h] * gk;
            }
            let du = (1.0 - a[h] * a[h]) * back;
            db1[h] = du;
            for (i, zi) in z.iter().enumerate() {
                dw1[i * self.hidden + h] = zi * du;
            }
        }
        let mut v = dw1;
        v.extend(db1);
        v.extend(dw2);
        v.extend_from_slice(g);
        Ok(v)
    }

    /// Full Jacobian `∂prompt/∂ψ`: one row per prompt entry.
    pub fn jacobian(&self, z: &[f64]) -> Result<Vec<Vec<f64>>, SttaError> {
        let out = self.output_dim();
        (0..out)
            .map(|k| {
                let mut e = vec![0.0; out];
                e[k] = 1.0;
                self.vjp(z, &e)
            })
            .collect()
    }

    pub fn to_checkpoint(&self, config_hash: &str) -> Checkpoint {
        let mut c = Checkpoint::new(config_hash);
        c.push("adapter.w1", vec![self.input_dim, self.hidden], self.w1.clone());
        c.push("adapter.b1", vec![self.hidden], self.b1.clone());
        c.push("adapter.w2", vec![self.hidden, self.output_dim()], self.w2.clone());
        c.push("adapter.b2", vec![self.prompt_len, self.prompt_width], self.b2.clone());
        c
    }

    pub fn from_checkpoint(c: &Checkpoint) -> Result<Self, SttaError> {
        let get = |n: &str| c.get(n).map_err(SttaError::from);
        let (w1, b1, w2, b2) = (get("adapter.w1")?, get("adapter.b1")?, get("adapter.w2")?, get("adapter.b2")?);
        let dims_ok = w1.dims.len() == 2 && b2.dims.len() == 2 && w2.dims.len() == 2;
        if !dims_ok {
            return Err(SttaError::Dimension("adapter tensors have unexpected rank".into()));
        }
        let mut p = Self::zeros(w1.dims[0], w1.dims[1], b2.dims[0], b2.dims[1]);
        if b1.values.len() != p.b1.len() || w2.values.len() != p.w2.len() || w1.values.len() != p.w1.len() || b2.values.len() != p.b2.len() {
            return Err(SttaError::Dimension("adapter tensor sizes disagree".into()));
        }
        p.w1.clone_from(&w1.values);
        p.b1.clone_from(&b1.values);
        p.w2.clone_from(&w2.values);
        p.b2.clone_from(&b2.values);
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_adapter_gives_zero_prompt() {
        let p = AdapterParams::init(3, 4, 2, 2, 1);
        assert_eq!(p.forward(&[0.0, 0.5, 1.0]).unwrap(), vec![0.0; 4]);
        assert!(p.forward(&[0.0]).is_err());
    }

    #[test]
    fn bias_only_ignores_input() {
        let mut p = AdapterParams::zeros(3, 4, 1, 2);
        p.b2 = vec![0.3, -0.7];
        assert_eq!(p.forward(&[0.0, 0.1, 0.2]).unwrap(), p.forward(&[1.0, 1.5, 2.0]).unwrap());
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut p = AdapterParams::init(3, 4, 2, 2, 9);
        p.b2[1] = 0.25;
        let back = AdapterParams::from_checkpoint(&p.to_checkpoint("h")).unwrap();
        assert_eq!(back, p);
    }
}
