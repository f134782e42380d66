//! Memory state pricing and reward shaping: Graph Description Length, task
//! relevance, and the per-step / terminal rewards.

mod memory;
mod relevance;

pub use memory::MemoryState;
pub use relevance::{relevance_heuristic, relevance_remote, RemoteScorer, Scorer, ScorerConfig};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GdlWeights {
    pub alpha_s: f64,
    pub alpha_f: f64,
}

impl Default for GdlWeights {
    fn default() -> Self {
        Self {
            alpha_s: 1.0,
            alpha_f: 1.0,
        }
    }
}

impl GdlWeights {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("alpha_s", self.alpha_s), ("alpha_f", self.alpha_f)] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// `α_s·m′ + α_f·n′·d_f` for raw counts.
pub fn gdl_counts(nodes: usize, edges: usize, feature_dims: usize, w: &GdlWeights) -> f64 {
    w.alpha_s * edges as f64 + w.alpha_f * nodes as f64 * feature_dims as f64
}

/// Graph Description Length of a memory state; `d_f` counts base feature
/// columns plus appended score columns.
pub fn gdl(m: &MemoryState, w: &GdlWeights) -> f64 {
    gdl_counts(m.node_count(), m.edge_count(), m.feature_dims(), w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w_solve: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            w1: 0.2,
            w2: 0.4,
            w3: 0.4,
            w_solve: 10.0,
            beta: 1.0,
            epsilon: 1e-8,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("w1", self.w1), ("w2", self.w2), ("w3", self.w3), ("w_solve", self.w_solve)] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(format!("beta must be finite and > 0, got {}", self.beta));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-6) {
            return Err(format!("epsilon must lie in (0, 1e-6], got {}", self.epsilon));
        }
        Ok(())
    }
}

/// One reward record. Intermediate records satisfy
/// `total = w1·succ + w2·delta_gdl + w3·delta_rel`; terminal ones `total = w_solve·success`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub succ: u8,
    pub delta_gdl: f64,
    pub delta_rel: f64,
    pub total: f64,
    pub gdl_before: f64,
    pub gdl_after: f64,
    pub rel_before: f64,
    pub rel_after: f64,
    pub terminal: bool,
}

impl RewardBreakdown {
    /// Recomputes `total` from the components.
    pub fn recompute_total(&self, w: &RewardWeights) -> f64 {
        if self.terminal {
            w.w_solve * f64::from(self.succ)
        } else {
            w.w1 * f64::from(self.succ) + w.w2 * self.delta_gdl + w.w3 * self.delta_rel
        }
    }
}

/// `tanh(β·(before − after)/(before + ε))`.
pub fn delta_gdl(gdl_before: f64, gdl_after: f64, w: &RewardWeights) -> f64 {
    (w.beta * (gdl_before - gdl_after) / (gdl_before + w.epsilon)).tanh()
}

pub fn step_reward(
    gdl_before: f64,
    gdl_after: f64,
    rel_before: f64,
    rel_after: f64,
    exec_ok: bool,
    w: &RewardWeights,
) -> RewardBreakdown {
    let succ = u8::from(exec_ok);
    let dg = delta_gdl(gdl_before, gdl_after, w);
    let dr = rel_after - rel_before;
    RewardBreakdown {
        succ,
        delta_gdl: dg,
        delta_rel: dr,
        total: w.w1 * f64::from(succ) + w.w2 * dg + w.w3 * dr,
        gdl_before,
        gdl_after,
        rel_before,
        rel_after,
        terminal: false,
    }
}

/// Terminal record; `gdl_*`/`rel_*` hold the final state's values on both sides.
pub fn terminal_reward(task_success: bool, gdl: f64, rel: f64, w: &RewardWeights) -> RewardBreakdown {
    let succ = u8::from(task_success);
    RewardBreakdown {
        succ,
        delta_gdl: 0.0,
        delta_rel: 0.0,
        total: w.w_solve * f64::from(succ),
        gdl_before: gdl,
        gdl_after: gdl,
        rel_before: rel,
        rel_after: rel,
        terminal: true,
    }
}
