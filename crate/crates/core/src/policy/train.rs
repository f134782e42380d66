//! Rollout collection and the PPO training loop.

use super::{gae, ppo_update, ActionSpace, LinearPolicy, PolicyParams, PpoConfig, Sample, ValueParams, FEATURE_DIM};
use crate::distill::Scorer;
use crate::env::{generate_tasks, run_episode, EnvConfig, Query, TaskTemplate, Trajectory};
use crate::error::PolicyError;
use crate::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub env: EnvConfig,
    pub ppo: PpoConfig,
    pub iters: usize,
    pub tasks_per_graph: usize,
    pub templates: Vec<TaskTemplate>,
    /// Width of the prompt block in the policy input (zero prompt during training).
    pub prompt_dim: usize,
    pub init_feature_scale: f64,
    /// Prompt rows stay at their initial values during training; a nonzero
    /// scale lets a test-time adapter steer the frozen policy.
    pub init_prompt_scale: f64,
    pub eval_temperature: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::default(),
            ppo: PpoConfig::default(),
            iters: 300,
            tasks_per_graph: 32,
            templates: vec![TaskTemplate::MaxFeatureInNeighborhood],
            prompt_dim: 32,
            init_feature_scale: 0.01,
            init_prompt_scale: 0.3,
            eval_temperature: 0.7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        self.env.validate()?;
        self.ppo.validate()?;
        if self.tasks_per_graph == 0 || self.templates.is_empty() {
            return Err(PolicyError::Contract("need at least one template and one task per graph".into()));
        }
        if !(self.eval_temperature.is_finite() && self.eval_temperature > 0.0) {
            return Err(PolicyError::Contract("eval_temperature must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub iter: usize,
    pub mean_return: f64,
    pub mean_n: f64,
    pub mean_final_gdl: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub policy: PolicyParams,
    pub value: ValueParams,
    pub curve: Vec<CurveRow>,
    pub skipped_updates: usize,
}

pub type Task = (Arc<Graph>, Arc<Query>);

/// Generates `cfg.tasks_per_graph` tasks on every graph.
pub fn build_tasks(graphs: &[Arc<Graph>], cfg: &TrainConfig, seed: u64) -> Result<Vec<Task>, PolicyError> {
    let mut out = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let qs = generate_tasks(g, &cfg.templates, cfg.tasks_per_graph, seed.wrapping_add(i as u64))?;
        out.extend(qs.into_iter().map(|q| (g.clone(), Arc::new(q))));
    }
    Ok(out)
}

/// Runs one episode with `params` and converts it into PPO samples.
#[allow(clippy::too_many_arguments)]
pub fn rollout(
    space: &ActionSpace,
    params: &PolicyParams,
    value: &ValueParams,
    prompt: &[f64],
    task: &Task,
    env: &EnvConfig,
    ppo: &PpoConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<(Trajectory, Vec<Sample>), PolicyError> {
    let mut pol = LinearPolicy::new(space, params, prompt.to_vec(), env.n_max)?;
    let traj = run_episode(&mut pol, task.0.clone(), task.1.clone(), env, scorer, seed)?;
    debug_assert_eq!(pol.decisions.len(), traj.len());
    let mut values: Vec<f64> = pol.decisions.iter().map(|d| value.value(&d.features)).collect();
    values.push(0.0);
    let adv = gae(&traj.rewards(), &values, ppo.gamma, ppo.lambda)?;
    let samples = pol
        .decisions
        .into_iter()
        .zip(adv)
        .zip(values)
        .map(|((d, a), v)| Sample {
            x: params.input(&d.features, prompt).expect("checked"),
            old_logprob: d.probs[d.action].ln(),
            features: d.features,
            mask: d.mask,
            action: d.action,
            old_probs: d.probs,
            advantage: a,
            value_target: a + v,
        })
        .collect();
    Ok((traj, samples))
}

/// PPO on tasks drawn uniformly from `graphs`. `hook` sees every curve row
/// with the parameters after that iteration's update.
pub fn train(
    graphs: &[Arc<Graph>],
    cfg: &TrainConfig,
    scorer: &Scorer,
    seed: u64,
    mut hook: Option<&mut dyn FnMut(&CurveRow, &PolicyParams, &ValueParams)>,
) -> Result<TrainOutput, PolicyError> {
    cfg.validate()?;
    let space = ActionSpace::standard();
    let mut policy = PolicyParams::random(
        cfg.prompt_dim,
        FEATURE_DIM,
        space.len(),
        cfg.init_feature_scale,
        cfg.init_prompt_scale,
        seed,
    );
    let mut value = ValueParams::zeros(FEATURE_DIM);
    let mut curve = Vec::with_capacity(cfg.iters);
    let mut skipped = 0;
    if cfg.iters == 0 {
        return Ok(TrainOutput { policy, value, curve, skipped_updates: 0 });
    }
    let tasks = build_tasks(graphs, cfg, seed)?;
    if tasks.is_empty() {
        return Err(PolicyError::Contract("no training tasks".into()));
    }
    let prompt = vec![0.0; cfg.prompt_dim];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7a11);
    for iter in 0..cfg.iters {
        let picks: Vec<(usize, u64)> = (0..cfg.ppo.batch).map(|_| (rng.random_range(0..tasks.len()), rng.random())).collect();
        let results = parallel_map(&picks, |&(ti, s)| {
            rollout(&space, &policy, &value, &prompt, &tasks[ti], &cfg.env, &cfg.ppo, scorer, s)
        });
        let mut batch = Vec::new();
        let (mut ret, mut n, mut gdl, mut succ) = (0.0, 0.0, 0.0, 0.0);
        for r in results {
            let (t, s) = r?;
            ret += t.discounted_return;
            n += t.len() as f64;
            gdl += t.final_gdl();
            succ += f64::from(t.terminal_eval);
            batch.extend(s);
        }
        let k = picks.len() as f64;
        let (np, nv, stats) = ppo_update(&batch, &policy, &value, &cfg.ppo)?;
        if stats.diverged {
            log::warn!("iteration {iter}: update diverged; skipped");
            skipped += 1;
        } else {
            policy = np;
            value = nv;
        }
        let row = CurveRow {
            iter,
            mean_return: ret / k,
            mean_n: n / k,
            mean_final_gdl: gdl / k,
            success_rate: succ / k,
        };
        if let Some(h) = hook.as_mut() {
            h(&row, &policy, &value);
        }
        curve.push(row);
    }
    Ok(TrainOutput { policy, value, curve, skipped_updates: skipped })
}

/// Order-preserving map over scoped threads.
pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub episodes: usize,
    pub success_rate: f64,
    pub mean_n: f64,
    pub mean_final_gdl: f64,
    pub mean_return: f64,
}

/// Sampled rollouts at `temperature`, cycling over `tasks`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    space: &ActionSpace,
    params: &PolicyParams,
    prompt: &[f64],
    tasks: &[Task],
    episodes: usize,
    temperature: f64,
    env: &EnvConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<EvalSummary, PolicyError> {
    if tasks.is_empty() || episodes == 0 {
        return Err(PolicyError::Contract("evaluation needs tasks and episodes".into()));
    }
    let jobs: Vec<usize> = (0..episodes).collect();
    let results = parallel_map(&jobs, |&e| -> Result<Trajectory, PolicyError> {
        let mut pol = LinearPolicy::new(space, params, prompt.to_vec(), env.n_max)?;
        pol.temperature = Some(temperature);
        let (g, q) = &tasks[e % tasks.len()];
        Ok(run_episode(&mut pol, g.clone(), q.clone(), env, scorer, seed.wrapping_add(e as u64))?)
    });
    let mut s = EvalSummary {
        episodes,
        success_rate: 0.0,
        mean_n: 0.0,
        mean_final_gdl: 0.0,
        mean_return: 0.0,
    };
    for r in results {
        let t = r?;
        s.success_rate += f64::from(t.terminal_eval);
        s.mean_n += t.len() as f64;
        s.mean_final_gdl += t.final_gdl();
        s.mean_return += t.discounted_return;
    }
    let k = episodes as f64;
    s.success_rate /= k;
    s.mean_n /= k;
    s.mean_final_gdl /= k;
    s.mean_return /= k;
    Ok(s)
}
