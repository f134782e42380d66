//! Flat named-tensor checkpoint container.

use super::{PolicyParams, ValueParams};
use crate::error::PolicyError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub dims: Vec<usize>,
    /// Row-major.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    #[serde(default)]
    pub seed: u64,
    pub tensors: Vec<Tensor>,
}

impl Checkpoint {
    pub fn new(config_hash: impl Into<String>) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed: 0,
            tensors: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn push(&mut self, name: &str, dims: Vec<usize>, values: Vec<f64>) {
        debug_assert_eq!(dims.iter().product::<usize>(), values.len());
        self.tensors.push(Tensor {
            name: name.to_string(),
            dims,
            values,
        });
    }

    pub fn get(&self, name: &str) -> Result<&Tensor, PolicyError> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| PolicyError::Checkpoint(format!("missing tensor `{name}`")))
    }

    pub fn from_policy(config_hash: &str, p: &PolicyParams, v: &ValueParams) -> Self {
        let mut c = Self::new(config_hash);
        c.push("policy.theta", vec![p.rows(), p.actions], p.theta.clone());
        c.push("policy.prompt_dim", vec![1], vec![p.prompt_dim as f64]);
        c.push("policy.temperature", vec![1], vec![p.temperature]);
        c.push("value.omega", vec![v.omega.len()], v.omega.clone());
        c.push("value.bias", vec![1], vec![v.bias]);
        c
    }

    pub fn to_policy(&self) -> Result<(PolicyParams, ValueParams), PolicyError> {
        let theta = self.get("policy.theta")?;
        let [rows, actions] = theta.dims[..] else {
            return Err(PolicyError::Checkpoint("policy.theta must be 2-D".into()));
        };
        let prompt_dim = scalar(self.get("policy.prompt_dim")?)? as usize;
        if prompt_dim > rows || theta.values.len() != rows * actions {
            return Err(PolicyError::Checkpoint("inconsistent policy.theta dims".into()));
        }
        let p = PolicyParams {
            theta: theta.values.clone(),
            prompt_dim,
            feature_dim: rows - prompt_dim,
            actions,
            temperature: scalar(self.get("policy.temperature")?)?,
        };
        let v = ValueParams {
            omega: self.get("value.omega")?.values.clone(),
            bias: scalar(self.get("value.bias")?)?,
        };
        if !p.is_finite() || !v.is_finite() {
            return Err(PolicyError::Checkpoint("non-finite parameters".into()));
        }
        Ok((p, v))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| PolicyError::Checkpoint(format!("{}: {e}", path.display())))
    }
}

fn scalar(t: &Tensor) -> Result<f64, PolicyError> {
    match t.values[..] {
        [v] => Ok(v),
        _ => Err(PolicyError::Checkpoint(format!("`{}` must hold one value", t.name))),
    }
}

/// SHA-256 over the exact bit patterns of the policy and value parameters.
pub fn params_digest(p: &PolicyParams, v: &ValueParams) -> String {
    let mut h = Sha256::new();
    for x in p.theta.iter().chain([&p.temperature]).chain(&v.omega).chain([&v.bias]) {
        h.update(x.to_bits().to_le_bytes());
    }
    h.update((p.prompt_dim as u64).to_le_bytes());
    h.update((p.actions as u64).to_le_bytes());
    hex::encode(h.finalize())
}
