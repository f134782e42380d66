//! The exploration MDP: states, actions, tool-driven transitions, episodes,
//! and the task suite with its ground-truth evaluators.

mod trajlog;
pub mod oracle;
mod tasks;

pub use trajlog::{parse_log, LogRecord, RunMeta, TrajectoryLog};
pub use tasks::{answer_matches, generate_tasks, sample_queries, scripted_chain, Answer, Query, TaskTemplate, ToolOutput};

use crate::distill::{gdl, step_reward, terminal_reward, GdlWeights, MemoryState, RewardBreakdown, RewardWeights, Scorer};
use crate::error::{EnvError, ToolError};
use crate::graph::{generate_synthetic, Graph, GraphFamily, GraphGenSpec};
use crate::tools::{self, ParamValue, Params, ToolCategory, DESCRIPTION_BUDGET};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    /// Episode cap; the step that reaches it is forced to terminate.
    pub n_max: usize,
    pub gamma: f64,
    pub reward: RewardWeights,
    pub gdl: GdlWeights,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            n_max: 16,
            gamma: 0.99,
            reward: RewardWeights::default(),
            gdl: GdlWeights::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.n_max == 0 {
            return Err(EnvError::Validation("n_max must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(EnvError::Validation(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        self.reward.validate().map_err(EnvError::Validation)?;
        self.gdl.validate().map_err(EnvError::Validation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Action {
    Tool { tool_id: String, params: Params },
    Terminate,
}

impl Action {
    pub fn tool(tool_id: &str, params: &[(&str, ParamValue)]) -> Self {
        Action::Tool {
            tool_id: tool_id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvState {
    pub query: Arc<Query>,
    pub graph: Arc<Graph>,
    pub memory: MemoryState,
    pub step_index: usize,
    pub action_history: Vec<(Action, String)>,
    pub done: bool,
    /// Payloads of successful calls, in order; answer extraction reads these.
    pub outputs: Vec<ToolOutput>,
    pub gdl: f64,
    pub rel: f64,
    /// Initial values, for normalized state features.
    pub gdl0: f64,
    pub last_category: Option<ToolCategory>,
    success: Option<bool>,
}

/// Compact state description logged with every step and fed to policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub nodes: usize,
    pub edges: usize,
    pub feature_dims: usize,
    pub gdl: f64,
    pub rel: f64,
    pub step: usize,
    pub last_category: Option<ToolCategory>,
    pub template: TaskTemplate,
}

impl EnvState {
    pub fn summary(&self) -> StateSummary {
        StateSummary {
            nodes: self.memory.node_count(),
            edges: self.memory.edge_count(),
            feature_dims: self.memory.feature_dims(),
            gdl: self.gdl,
            rel: self.rel,
            step: self.step_index,
            last_category: self.last_category,
            template: self.query.template,
        }
    }

    /// Set once the episode is done.
    pub fn success(&self) -> Option<bool> {
        self.success
    }
}

pub fn reset(g: Arc<Graph>, q: Arc<Query>, cfg: &EnvConfig, scorer: &Scorer) -> Result<EnvState, EnvError> {
    let n = g.node_count();
    if let Some(&bad) = q.bound_nodes().iter().find(|&&v| v >= n) {
        return Err(EnvError::Validation(format!("query binds node {bad} but the graph has {n} nodes")));
    }
    let memory = MemoryState::from_graph(g.clone());
    let g0 = gdl(&memory, &cfg.gdl);
    let rel = scorer.score(&memory, &q, None)?;
    Ok(EnvState {
        query: q,
        graph: g,
        memory,
        step_index: 0,
        action_history: Vec::new(),
        done: false,
        outputs: Vec::new(),
        gdl: g0,
        rel,
        gdl0: g0,
        last_category: None,
        success: None,
    })
}

/// Grades a finished episode.
pub fn evaluate_task_success(q: &Query, s: &EnvState) -> Result<bool, EnvError> {
    if !s.done {
        return Err(EnvError::Contract("episode is not finished".into()));
    }
    Ok(answer_matches(q, &s.memory, &s.outputs))
}

/// Applies one action. Tool failures (unknown tool, bad parameters, execution
/// errors) are agent-visible: `succ = 0`, memory unchanged, episode continues.
pub fn step(s: &mut EnvState, a: &Action, cfg: &EnvConfig, scorer: &Scorer) -> Result<(RewardBreakdown, String), EnvError> {
    if s.done {
        return Err(EnvError::Contract("step on a finished episode".into()));
    }
    let forced = s.step_index + 1 >= cfg.n_max;
    let (recorded, reward, description) = match a {
        Action::Tool { tool_id, params } if !forced => {
            let category = tools::registry()
                .iter()
                .find(|t| t.tool_id == tools::resolve_alias(tool_id))
                .map(|t| t.category);
            match tools::invoke(tool_id, &s.memory, params) {
                Ok(res) => {
                    let gdl_after = gdl(&res.memory_after, &cfg.gdl);
                    let rel_after = scorer.score(&res.memory_after, &s.query, Some(&res.description))?;
                    let r = step_reward(s.gdl, gdl_after, s.rel, rel_after, true, &cfg.reward);
                    s.outputs.push(ToolOutput {
                        tool_id: tools::resolve_alias(tool_id).to_string(),
                        params: params.clone(),
                        payload: res.raw_payload,
                    });
                    s.memory = res.memory_after;
                    s.gdl = gdl_after;
                    s.rel = rel_after;
                    s.last_category = category;
                    (a.clone(), r, res.description)
                }
                Err(e @ (ToolError::ToolNotFound(_) | ToolError::ParamError { .. } | ToolError::ToolExecutionError { .. })) => {
                    let r = step_reward(s.gdl, s.gdl, s.rel, s.rel, false, &cfg.reward);
                    s.last_category = category;
                    (a.clone(), r, tools_error_text(&e))
                }
            }
        }
        _ => {
            let success = answer_matches(&s.query, &s.memory, &s.outputs);
            s.success = Some(success);
            s.done = true;
            let note = if matches!(a, Action::Terminate) {
                "Terminated.".to_string()
            } else {
                format!("Step limit {} reached; terminated.", cfg.n_max)
            };
            (Action::Terminate, terminal_reward(success, s.gdl, s.rel, &cfg.reward), note)
        }
    };
    s.action_history.push((recorded, description.clone()));
    s.step_index += 1;
    Ok((reward, description))
}

fn tools_error_text(e: &ToolError) -> String {
    tools::truncate_chars(&e.to_string(), DESCRIPTION_BUDGET)
}

/// Chooses the next action. Implementations may keep per-episode side
/// information (e.g. log-probabilities) and must be deterministic given `rng`.
pub trait ActionSampler {
    fn select(&mut self, state: &EnvState, rng: &mut ChaCha8Rng) -> Action;

    /// Called once before the first step of every episode.
    fn begin_episode(&mut self) {}
}

/// Always terminates immediately.
pub struct TerminatePolicy;

impl ActionSampler for TerminatePolicy {
    fn select(&mut self, _: &EnvState, _: &mut ChaCha8Rng) -> Action {
        Action::Terminate
    }
}

/// Plays a fixed action list, then terminates.
pub struct ScriptedPolicy {
    actions: Vec<Action>,
    next: usize,
}

impl ScriptedPolicy {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions, next: 0 }
    }

    /// The generator's reference chain for `q`.
    pub fn for_query(q: &Query) -> Self {
        Self::new(scripted_chain(q))
    }
}

impl ActionSampler for ScriptedPolicy {
    fn select(&mut self, _: &EnvState, _: &mut ChaCha8Rng) -> Action {
        let a = self.actions.get(self.next).cloned().unwrap_or(Action::Terminate);
        self.next += 1;
        a
    }

    fn begin_episode(&mut self) {
        self.next = 0;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state: StateSummary,
    pub action: Action,
    pub description: String,
    pub reward: RewardBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub terminal_eval: u8,
    pub discounted_return: f64,
}

impl Trajectory {
    /// Number of records, the terminal one included.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_gdl(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.reward.gdl_after)
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward.total).collect()
    }
}

/// Graphs for the planted two-step family: `G(n, p)` with one uniform
/// feature column `x0`, seeds `seed..seed + count`.
pub fn planted_graphs(count: usize, n: usize, p: f64, seed: u64) -> Result<Vec<Arc<Graph>>, EnvError> {
    (0..count as u64)
        .map(|i| {
            let mut spec = GraphGenSpec::new(GraphFamily::ErdosRenyi { n, p }, seed.wrapping_add(i));
            spec.feature_columns = 1;
            generate_synthetic(&spec)
                .map(Arc::new)
                .map_err(|e| EnvError::Generation(e.to_string()))
        })
        .collect()
}

pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    rewards.iter().rev().fold(0.0, |acc, r| r + gamma * acc)
}

/// Runs one episode to completion.
pub fn run_episode(
    policy: &mut dyn ActionSampler,
    g: Arc<Graph>,
    q: Arc<Query>,
    cfg: &EnvConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<Trajectory, EnvError> {
    let (t, _) = run_episode_with_state(policy, g, q, cfg, scorer, seed)?;
    Ok(t)
}

/// As [`run_episode`], also returning the final state.
pub fn run_episode_with_state(
    policy: &mut dyn ActionSampler,
    g: Arc<Graph>,
    q: Arc<Query>,
    cfg: &EnvConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<(Trajectory, EnvState), EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = reset(g, q, cfg, scorer)?;
    policy.begin_episode();
    let mut records = Vec::new();
    while !s.done {
        let state = s.summary();
        let a = policy.select(&s, &mut rng);
        let (reward, description) = step(&mut s, &a, cfg, scorer)?;
        let action = s.action_history.last().map(|(a, _)| a.clone()).unwrap_or(a);
        records.push(StepRecord { state, action, description, reward });
    }
    let rewards: Vec<f64> = records.iter().map(|r| r.reward.total).collect();
    let traj = Trajectory {
        terminal_eval: u8::from(s.success == Some(true)),
        discounted_return: discounted_return(&rewards, cfg.gamma),
        records,
    };
    Ok((traj, s))
}
