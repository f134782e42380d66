//! Uniform-random-policy episodes over a mixed task pool, logged.
#![allow(dead_code)]

use graphdistill::env::{parse_log, planted_graphs, sample_queries, RunMeta, TrajectoryLog};
use graphdistill::graph::{generate_synthetic, GraphFamily, GraphGenSpec};
use graphdistill::policy::{ActionSpace, LinearPolicy, PolicyParams, FEATURE_DIM};
use graphdistill::{run_episode, EnvConfig, Graph, Query, RewardBreakdown, RewardWeights, Scorer};
use std::sync::Arc;

pub fn task_pool(seed: u64) -> Vec<(Arc<Graph>, Arc<Query>)> {
    let mut graphs = planted_graphs(3, 40, 0.1, seed).unwrap();
    for family in [
        GraphFamily::StochasticBlock { sizes: vec![12, 12, 12], p_in: 0.35, p_out: 0.03 },
        GraphFamily::BarabasiAlbert { n: 50, m: 2 },
    ] {
        let mut spec = GraphGenSpec::new(family, seed);
        spec.feature_columns = 2;
        graphs.push(Arc::new(generate_synthetic(&spec).unwrap()));
    }
    let mut out = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        for q in sample_queries(g, 8, seed.wrapping_add(i as u64)).unwrap() {
            out.push((g.clone(), Arc::new(q)));
        }
    }
    out
}

/// Runs `episodes` uniform-random episodes (spread over four threads, logged
/// in episode order) and returns the log.
pub fn random_policy_log(episodes: usize, seed: u64) -> TrajectoryLog {
    let tasks = task_pool(seed);
    let env = EnvConfig::default();
    let scorer = Scorer::heuristic();
    let space = ActionSpace::standard();
    let params = PolicyParams::zeros(0, FEATURE_DIM, space.len());
    let run = |e: usize| {
        let (g, q) = &tasks[e % tasks.len()];
        let mut pol = LinearPolicy::new(&space, &params, vec![], env.n_max).unwrap();
        run_episode(&mut pol, g.clone(), q.clone(), &env, &scorer, seed.wrapping_mul(1_000_003).wrapping_add(e as u64)).unwrap()
    };
    let trajs: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|k| s.spawn(move || (k..episodes).step_by(4).map(|e| (e, run(e))).collect::<Vec<_>>())).collect();
        let mut all: Vec<_> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
        all.sort_by_key(|(e, _)| *e);
        all
    });
    let log = TrajectoryLog::in_memory(RunMeta { seed, config_hash: "random-policy".into() });
    for (e, t) in &trajs {
        log.append(*e, t).unwrap();
    }
    log
}

/// Largest disagreement between a record and the reward recomputed from its
/// raw before/after values.
pub fn recompute_error(b: &RewardBreakdown, w: &RewardWeights) -> f64 {
    if b.terminal {
        return (b.total - w.w_solve * f64::from(b.succ)).abs();
    }
    let dg = (w.beta * (b.gdl_before - b.gdl_after) / (b.gdl_before + w.epsilon)).tanh();
    let dr = b.rel_after - b.rel_before;
    let total = w.w1 * f64::from(b.succ) + w.w2 * dg + w.w3 * dr;
    (dg - b.delta_gdl).abs().max((dr - b.delta_rel).abs()).max((total - b.total).abs())
}

pub struct LogAudit {
    pub records: usize,
    pub skipped: usize,
    pub max_recompute_error: f64,
    pub longest_description: usize,
    pub max_steps: usize,
}

pub fn audit(text: &str, w: &RewardWeights) -> LogAudit {
    let (records, skipped) = parse_log(text);
    LogAudit {
        records: records.len(),
        skipped,
        max_recompute_error: records.iter().map(|r| recompute_error(&r.record.reward, w)).fold(0.0, f64::max),
        longest_description: records.iter().map(|r| r.record.description.chars().count()).max().unwrap_or(0),
        max_steps: records.iter().map(|r| r.step + 1).max().unwrap_or(0),
    }
}
