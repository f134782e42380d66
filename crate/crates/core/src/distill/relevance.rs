//! Task-relevance scoring: a ground-truth-aware heuristic and an HTTP scorer.

use super::MemoryState;
use crate::env::Query;
use crate::error::ScorerError;
use serde::{Deserialize, Serialize};
use std::time::Duration;

/// Recall of the query's target set in the current node set, boosted by half
/// when the query's designated score column is present, clamped to `[0, 1]`.
/// An empty target set counts as full recall.
pub fn relevance_heuristic(m: &MemoryState, q: &Query) -> Result<f64, ScorerError> {
    let target = q.target_set.as_ref().ok_or(ScorerError::MissingGroundTruth)?;
    let recall = if target.is_empty() {
        1.0
    } else {
        let hit = target.iter().filter(|&&v| m.local_of(v).is_some()).count();
        hit as f64 / target.len() as f64
    };
    let bonus = match &q.designated_column {
        Some(c) if m.has_column(c) => 1.5,
        _ => 1.0,
    };
    Ok((recall * bonus).clamp(0.0, 1.0))
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    query: &'a str,
    history: &'a [String],
    description: &'a str,
}

/// One blocking POST to `endpoint`; the body must be a single decimal.
/// Out-of-range values are clamped with a warning.
pub fn relevance_remote(
    endpoint: &str,
    query: &str,
    history: &[String],
    description: &str,
    timeout: Duration,
) -> Result<f64, ScorerError> {
    let unavailable = |e: &dyn std::fmt::Display| ScorerError::ScorerUnavailable(format!("{endpoint}: {e}"));
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into();
    let payload = serde_json::to_string(&ScoreRequest {
        query,
        history,
        description,
    })
    .map_err(|e| unavailable(&e))?;
    let mut response = agent
        .post(endpoint)
        .header("content-type", "application/json")
        .send(payload.as_str())
        .map_err(|e| unavailable(&e))?;
    let body = response.body_mut().read_to_string().map_err(|e| unavailable(&e))?;
    let value: f64 = body
        .trim()
        .parse()
        .map_err(|_| unavailable(&format!("non-numeric body {:?}", body.trim())))?;
    if !value.is_finite() {
        return Err(unavailable(&"non-finite score"));
    }
    if !(0.0..=1.0).contains(&value) {
        log::warn!("scorer at {endpoint} returned {value}; clamping to [0, 1]");
    }
    Ok(value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteScorer {
    pub endpoint: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Use the heuristic when the endpoint fails instead of erroring.
    #[serde(default = "default_true")]
    pub fallback_to_heuristic: bool,
}

fn default_timeout_ms() -> u64 {
    2_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScorerConfig {
    #[default]
    Heuristic,
    Remote(RemoteScorer),
}

/// The relevance function handed to the environment.
#[derive(Debug, Clone, Default)]
pub struct Scorer {
    config: ScorerConfig,
}

impl Scorer {
    pub fn new(config: ScorerConfig) -> Self {
        Self { config }
    }

    pub fn heuristic() -> Self {
        Self::default()
    }

    pub fn config(&self) -> &ScorerConfig {
        &self.config
    }

    /// Scores `m` for `q`; `description` is the latest tool description, if any.
    pub fn score(&self, m: &MemoryState, q: &Query, description: Option<&str>) -> Result<f64, ScorerError> {
        match &self.config {
            ScorerConfig::Heuristic => relevance_heuristic(m, q),
            ScorerConfig::Remote(r) => {
                let result = relevance_remote(
                    &r.endpoint,
                    &q.text,
                    m.history(),
                    description.unwrap_or(""),
                    Duration::from_millis(r.timeout_ms),
                );
                match result {
                    Err(e) if r.fallback_to_heuristic => {
                        log::warn!("{e}; falling back to the heuristic scorer");
                        relevance_heuristic(m, q)
                    }
                    other => other,
                }
            }
        }
    }
}
