//! Per-episode GDL/relevance/reward series read back from a trajectory log.

use crate::distill::RewardWeights;
use crate::env::parse_log;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Aligned series over the intermediate (non-terminal) steps of one episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSeries {
    pub episode: usize,
    /// `GDL` after each step.
    pub gdl: Vec<f64>,
    /// Relevance after each step.
    pub rel: Vec<f64>,
    pub succ: Vec<u8>,
    pub delta_gdl: Vec<f64>,
    pub delta_rel: Vec<f64>,
    pub total: Vec<f64>,
    pub terminal_total: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DistillationSeries {
    pub episodes: Vec<EpisodeSeries>,
    /// Unparseable lines.
    pub skipped: usize,
    /// Fraction of intermediate steps with `GDL_after < GDL_before`.
    pub frac_gdl_decrease: f64,
    /// Fraction of intermediate steps with `Rel_after > Rel_before`.
    pub frac_rel_increase: f64,
    /// Largest `|total − recomputed total|` over all records.
    pub max_recompute_error: f64,
}

pub fn distillation_curves(log: &str, w: &RewardWeights) -> DistillationSeries {
    let (records, skipped) = parse_log(log);
    let mut by_episode: BTreeMap<usize, EpisodeSeries> = BTreeMap::new();
    let (mut steps, mut dec, mut inc) = (0usize, 0usize, 0usize);
    let mut max_err: f64 = 0.0;
    for r in &records {
        let b = &r.record.reward;
        max_err = max_err.max((b.total - b.recompute_total(w)).abs());
        let e = by_episode.entry(r.episode).or_insert_with(|| EpisodeSeries { episode: r.episode, ..Default::default() });
        if b.terminal {
            e.terminal_total = Some(b.total);
            continue;
        }
        steps += 1;
        dec += usize::from(b.gdl_after < b.gdl_before);
        inc += usize::from(b.rel_after > b.rel_before);
        e.gdl.push(b.gdl_after);
        e.rel.push(b.rel_after);
        e.succ.push(b.succ);
        e.delta_gdl.push(b.delta_gdl);
        e.delta_rel.push(b.delta_rel);
        e.total.push(b.total);
    }
    let frac = |k: usize| if steps == 0 { 0.0 } else { k as f64 / steps as f64 };
    DistillationSeries {
        episodes: by_episode.into_values().collect(),
        skipped,
        frac_gdl_decrease: frac(dec),
        frac_rel_increase: frac(inc),
        max_recompute_error: max_err,
    }
}
