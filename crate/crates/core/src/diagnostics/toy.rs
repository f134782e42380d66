//! Information check on a toy MDP small enough that memory states can be
//! enumerated: a trained policy should leave memories that say more about the
//! answer, and describe it more compactly, than a uniformly random policy.

use super::{exact_mi, JointTable};
use crate::distill::Scorer;
use crate::env::{planted_graphs, reset, step, ActionSampler};
use crate::error::{DiagnosticsError, PolicyError};
use crate::policy::{build_tasks, parallel_map, train, ActionSpace, LinearPolicy, PolicyParams, Task, TrainConfig, FEATURE_DIM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfoCheckConfig {
    pub graphs: usize,
    /// At most 16, so a memory node set fits a bitmask.
    pub nodes: usize,
    pub edge_prob: f64,
    pub graph_seed: u64,
    pub train: TrainConfig,
    pub episodes: usize,
}

impl Default for InfoCheckConfig {
    fn default() -> Self {
        Self {
            graphs: 4,
            nodes: 8,
            edge_prob: 0.35,
            graph_seed: 11,
            train: TrainConfig { iters: 200, tasks_per_graph: 16, ..Default::default() },
            episodes: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyInfo {
    /// `I(m_N; Y)` in bits from episode counts.
    pub mi_bits: f64,
    /// `H(Y)` over the evaluated episodes, the ceiling for `mi_bits`.
    pub answer_entropy_bits: f64,
    pub mean_final_gdl: f64,
    pub success_rate: f64,
    /// `I(m_t; Y)` for `t = 0..n_max` (finished episodes hold their final memory).
    pub mi_by_step: Vec<f64>,
    pub mean_rel_by_step: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub trained: PolicyInfo,
    pub random: PolicyInfo,
    /// Pearson correlation of mean relevance and `I(m_t; Y)` across steps for the trained policy.
    pub rel_mi_correlation: f64,
    pub mi_improved: bool,
    pub gdl_improved: bool,
}

/// `I(M; Y)` in bits for paired discrete observations with arbitrary keys.
pub fn memory_answer_mi<K: Ord + Clone>(pairs: &[(K, usize)]) -> Result<f64, DiagnosticsError> {
    let mut keys: BTreeMap<K, usize> = BTreeMap::new();
    for (k, _) in pairs {
        let next = keys.len();
        keys.entry(k.clone()).or_insert(next);
    }
    let obs: Vec<Vec<usize>> = pairs.iter().map(|(k, y)| vec![keys[k], *y]).collect();
    let j = JointTable::empirical(&["m", "y"], &obs)?;
    exact_mi(&j, &["m"], &["y"], &[])
}

fn entropy_bits(labels: &[usize]) -> f64 {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let n = labels.len() as f64;
    counts.values().map(|&c| c as f64 / n).map(|p| -p * p.log2()).sum()
}

struct Episode {
    /// Memory key after each of `n_max` steps (padded with the final memory).
    keys: Vec<(usize, u64)>,
    rels: Vec<f64>,
    final_gdl: f64,
    success: bool,
}

fn memory_key(ids: &[usize]) -> u64 {
    ids.iter().fold(0u64, |acc, &i| acc | (1 << i))
}

fn evaluate(
    space: &ActionSpace,
    params: &PolicyParams,
    tasks: &[(usize, Task)],
    cfg: &InfoCheckConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<PolicyInfo, DiagnosticsError> {
    let env = &cfg.train.env;
    let prompt = vec![0.0; params.prompt_dim];
    let jobs: Vec<usize> = (0..cfg.episodes).collect();
    let eps = parallel_map(&jobs, |&e| -> Result<Episode, PolicyError> {
        let (gi, (g, q)) = &tasks[e % tasks.len()];
        let mut pol = LinearPolicy::new(space, params, prompt.clone(), env.n_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(e as u64));
        let mut s = reset(g.clone(), q.clone(), env, scorer)?;
        pol.begin_episode();
        let mut keys = vec![(*gi, memory_key(s.memory.original_ids()))];
        let mut rels = vec![s.rel];
        while !s.done {
            let a = pol.select(&s, &mut rng);
            step(&mut s, &a, env, scorer)?;
            keys.push((*gi, memory_key(s.memory.original_ids())));
            rels.push(s.rel);
        }
        let last = *keys.last().expect("non-empty");
        let last_rel = *rels.last().expect("non-empty");
        keys.resize(env.n_max + 1, last);
        rels.resize(env.n_max + 1, last_rel);
        Ok(Episode { keys, rels, final_gdl: s.gdl, success: s.success().unwrap_or(false) })
    });
    let eps: Vec<Episode> = eps
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| DiagnosticsError::Contract(e.to_string()))?;
    // Dense answer labels from the serialized ground truth.
    let mut answers: BTreeMap<String, usize> = BTreeMap::new();
    let labels: Vec<usize> = (0..cfg.episodes)
        .map(|e| {
            let (gi, (_, q)) = &tasks[e % tasks.len()];
            let key = format!("{gi}:{}", serde_json::to_string(&q.ground_truth).expect("answers serialize"));
            let next = answers.len();
            *answers.entry(key).or_insert(next)
        })
        .collect();
    let steps = env.n_max + 1;
    let mut mi_by_step = Vec::with_capacity(steps);
    let mut mean_rel_by_step = Vec::with_capacity(steps);
    for t in 0..steps {
        let pairs: Vec<((usize, u64), usize)> = eps.iter().zip(&labels).map(|(ep, &y)| (ep.keys[t], y)).collect();
        mi_by_step.push(memory_answer_mi(&pairs)?);
        mean_rel_by_step.push(eps.iter().map(|ep| ep.rels[t]).sum::<f64>() / eps.len() as f64);
    }
    let n = eps.len() as f64;
    Ok(PolicyInfo {
        mi_bits: *mi_by_step.last().expect("non-empty"),
        answer_entropy_bits: entropy_bits(&labels),
        mean_final_gdl: eps.iter().map(|e| e.final_gdl).sum::<f64>() / n,
        success_rate: eps.iter().filter(|e| e.success).count() as f64 / n,
        mi_by_step,
        mean_rel_by_step,
    })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// Trains on small planted graphs, then compares the trained and a uniform
/// random policy over `cfg.episodes` episodes on the same tasks.
pub fn information_check(cfg: &InfoCheckConfig, scorer: &Scorer, seed: u64) -> Result<InfoReport, DiagnosticsError> {
    if cfg.nodes == 0 || cfg.nodes > 16 || cfg.episodes == 0 {
        return Err(DiagnosticsError::Contract("need 1..=16 nodes and at least one episode".into()));
    }
    let contract = |e: PolicyError| DiagnosticsError::Contract(e.to_string());
    let graphs = planted_graphs(cfg.graphs, cfg.nodes, cfg.edge_prob, cfg.graph_seed).map_err(|e| DiagnosticsError::Contract(e.to_string()))?;
    let out = train(&graphs, &cfg.train, scorer, seed, None).map_err(contract)?;
    let mut tasks: Vec<(usize, Task)> = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let ts = build_tasks(std::slice::from_ref(g), &cfg.train, seed.wrapping_add(1000 + gi as u64)).map_err(contract)?;
        tasks.extend(ts.into_iter().map(|t| (gi, t)));
    }
    if tasks.is_empty() {
        return Err(DiagnosticsError::Contract("no evaluation tasks".into()));
    }
    let space = ActionSpace::standard();
    let random = PolicyParams::zeros(cfg.train.prompt_dim, FEATURE_DIM, space.len());
    let trained = evaluate(&space, &out.policy, &tasks, cfg, scorer, seed ^ 0xe7a1)?;
    let random = evaluate(&space, &random, &tasks, cfg, scorer, seed ^ 0xe7a1)?;
    Ok(InfoReport {
        rel_mi_correlation: pearson(&trained.mean_rel_by_step, &trained.mi_by_step),
        mi_improved: trained.mi_bits > random.mi_bits,
        gdl_improved: trained.mean_final_gdl < random.mean_final_gdl,
        trained,
        random,
    })
}
