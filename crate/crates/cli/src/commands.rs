//! Subcommand implementations. Each writes its tables into an [`Output`] and
//! returns a short human-readable report for stdout.

use crate::config::{PolicyKind, RunConfig};
use crate::{format_num, CliError, Output};
use graphdistill::env::{run_episode, RunMeta, ScriptedPolicy, TrajectoryLog};
use graphdistill::graph::{generate_synthetic, load_edge_list, GraphFamily, GraphGenSpec};
use graphdistill::policy::{build_tasks, evaluate, train, ActionSpace, Checkpoint, LinearPolicy, PolicyParams, FEATURE_DIM};
use graphdistill::stta::{adapt, fingerprint, generate_aux_queries, mean_chain_length, AdaptRow};
use graphdistill::tools::{ParamValue, Params, ToolCategory};
use graphdistill::{registry, Action, EnvConfig, Graph, Query, Scorer, TaskTemplate, Trajectory};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

fn num(v: f64) -> String {
    format_num(v)
}

fn file_digest(path: &Path) -> Result<String, CliError> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn checkpoint_path(cfg: &RunConfig, out: &Output) -> PathBuf {
    cfg.policy.checkpoint.clone().unwrap_or_else(|| out.path("policy.json"))
}

fn load_policy(path: &Path, hash: &str) -> Result<PolicyParams, CliError> {
    let ck = Checkpoint::load(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    if ck.config_hash != hash {
        log::warn!("checkpoint {} was trained under config {}, running under {hash}", path.display(), ck.config_hash);
    }
    Ok(ck.to_policy()?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListFormat {
    Table,
    Manifest,
}

/// `tools list`: the registry grouped by category, or its JSON manifest.
pub fn tools_list(format: ListFormat) -> Result<String, CliError> {
    let reg = registry();
    match format {
        ListFormat::Manifest => serde_json::to_string_pretty(&reg).map_err(|e| CliError::Runtime(e.to_string())),
        ListFormat::Table => {
            let mut s = String::from("category\ttool_id\tparams\tmutates_memory\torigin\n");
            for cat in ToolCategory::ALL {
                for t in reg.iter().filter(|t| t.category == cat) {
                    let params: Vec<String> = t
                        .param_schema
                        .iter()
                        .map(|p| if p.optional { format!("[{}]", p.name) } else { p.name.clone() })
                        .collect();
                    let origin = if t.origin.is_empty() { "-" } else { &t.origin };
                    s.push_str(&format!("{}\t{}\t{}\t{}\t{origin}\n", cat.name(), t.tool_id, params.join(","), t.mutates_memory));
                }
            }
            Ok(s)
        }
    }
}

fn param(k: &str, v: ParamValue) -> (String, ParamValue) {
    (k.to_string(), v)
}

/// The five-call chain used for scale runs on a neighbourhood-maximum query:
/// components, degree, the query's 1-hop ball, then two rankings on `x0`.
pub fn scale_chain(q: &Query) -> Result<Vec<Action>, CliError> {
    if q.template != TaskTemplate::MaxFeatureInNeighborhood {
        return Err(CliError::Runtime(format!("scale chain needs a {} query", TaskTemplate::MaxFeatureInNeighborhood.id())));
    }
    let center = q.binding_int("node").ok_or_else(|| CliError::Runtime("query has no node binding".into()))?;
    let tool = |id: &str, p: Vec<(String, ParamValue)>| Action::Tool { tool_id: id.to_string(), params: p.into_iter().collect::<Params>() };
    let x0 = || ParamValue::Text("x0".into());
    Ok(vec![
        tool("weakly_connected_components", vec![]),
        tool("degree", vec![]),
        tool("k_hop_subgraph", vec![param("center", ParamValue::Int(center)), param("hops", ParamValue::Int(1))]),
        tool("top_k_by_score", vec![param("column", x0()), param("k", ParamValue::Int(3))]),
        tool("top_k_by_score", vec![param("column", x0()), param("k", ParamValue::Int(1))]),
    ])
}

fn episode_row(i: usize, graph: usize, q: &Query, t: &Trajectory) -> Vec<String> {
    vec![
        i.to_string(),
        graph.to_string(),
        q.template.id().to_string(),
        t.len().to_string(),
        num(t.records.first().map_or(0.0, |r| r.reward.gdl_before)),
        num(t.final_gdl()),
        num(t.discounted_return),
        t.terminal_eval.to_string(),
    ]
}

const EPISODE_HEADER: [&str; 8] = ["episode", "graph", "template", "steps", "gdl_initial", "gdl_final", "return", "success"];

/// `run`: one episode per generated task on every configured graph
/// (or only task `query` of the first graph).
pub fn run(cfg: &RunConfig, out: &Output, query: Option<usize>) -> Result<String, CliError> {
    let t0 = Instant::now();
    let graphs = cfg.graph.load("graph")?;
    let scorer = Scorer::new(cfg.scorer.clone());
    let env = &cfg.train.env;
    let space = ActionSpace::standard();
    let trained = match cfg.policy.kind {
        PolicyKind::Trained => Some(load_policy(&checkpoint_path(cfg, out), out.hash())?),
        _ => None,
    };
    let uniform = PolicyParams::zeros(cfg.train.prompt_dim, FEATURE_DIM, space.len());
    let mut jobs: Vec<(usize, Arc<Query>)> = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let qs = cfg.tasks(g)?;
        jobs.extend(qs.into_iter().map(|q| (gi, Arc::new(q))));
    }
    if let Some(k) = query {
        let first: Vec<_> = jobs.iter().filter(|(gi, _)| *gi == 0).cloned().collect();
        let pick = first
            .get(k)
            .cloned()
            .ok_or_else(|| CliError::Config(format!("--query {k} out of range ({} tasks on the first graph)", first.len())))?;
        jobs = vec![pick];
    }
    let log = TrajectoryLog::create(&out.path("trajectory.jsonl"), RunMeta { seed: cfg.seed, config_hash: out.hash().to_string() })?;
    let mut rows = Vec::with_capacity(jobs.len());
    let (mut succ, mut steps, mut gdl) = (0.0, 0.0, 0.0);
    for (i, (gi, q)) in jobs.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(i as u64);
        let g = graphs[*gi].clone();
        let t = match cfg.policy.kind {
            PolicyKind::Scripted => run_episode(&mut ScriptedPolicy::for_query(q), g, q.clone(), env, &scorer, seed)?,
            PolicyKind::Random | PolicyKind::Trained => {
                let params = trained.as_ref().unwrap_or(&uniform);
                let mut pol = LinearPolicy::new(&space, params, vec![0.0; params.prompt_dim], env.n_max)?;
                if trained.is_some() {
                    pol.temperature = Some(cfg.train.eval_temperature);
                }
                run_episode(&mut pol, g, q.clone(), env, &scorer, seed)?
            }
        };
        log.append(i, &t)?;
        succ += f64::from(t.terminal_eval);
        steps += t.len() as f64;
        gdl += t.final_gdl();
        rows.push(episode_row(i, *gi, q, &t));
    }
    log.flush()?;
    let k = jobs.len().max(1) as f64;
    out.table("episode.tsv", &EPISODE_HEADER, &rows)?;
    out.table(
        "summary.tsv",
        &["episodes", "success_rate", "mean_steps", "mean_final_gdl", "log_lines", "log_digest"],
        &[vec![
            jobs.len().to_string(),
            num(succ / k),
            num(steps / k),
            num(gdl / k),
            log.line_count().to_string(),
            log.digest(),
        ]],
    )?;
    out.timings(&[("run".into(), t0.elapsed().as_secs_f64())])?;
    Ok(format!(
        "{} episodes: success {:.3}, mean steps {:.2}, mean final GDL {:.3}, log digest {}",
        jobs.len(),
        succ / k,
        steps / k,
        gdl / k,
        log.digest()
    ))
}

/// `train`: PPO on the configured graphs, with before/after evaluation.
pub fn train_cmd(cfg: &RunConfig, out: &Output) -> Result<String, CliError> {
    let t0 = Instant::now();
    let graphs = cfg.graph.load("graph")?;
    let scorer = Scorer::new(cfg.scorer.clone());
    let hash = out.hash().to_string();
    let every = cfg.policy.save_every;
    let mut save_error = None;
    let mut hook = |row: &graphdistill::policy::CurveRow, p: &PolicyParams, v: &graphdistill::policy::ValueParams| {
        if every > 0 && (row.iter + 1).is_multiple_of(every) && save_error.is_none() {
            let name = format!("checkpoints/iter_{:05}.json", row.iter + 1);
            if let Err(e) = out.json(&name, &Checkpoint::from_policy(&hash, p, v).with_seed(cfg.seed)) {
                save_error = Some(e);
            }
        }
        log::info!(
            "iter {:4}: return {:8.3}  N {:5.2}  GDL {:8.3}  success {:.2}",
            row.iter,
            row.mean_return,
            row.mean_n,
            row.mean_final_gdl,
            row.success_rate
        );
    };
    let trained = train(&graphs, &cfg.train, &scorer, cfg.seed, Some(&mut hook))?;
    if let Some(e) = save_error {
        return Err(e);
    }
    let train_secs = t0.elapsed().as_secs_f64();
    let rows: Vec<Vec<String>> = trained
        .curve
        .iter()
        .map(|r| vec![r.iter.to_string(), num(r.mean_return), num(r.mean_n), num(r.mean_final_gdl), num(r.success_rate)])
        .collect();
    out.table("curve.tsv", &["iter", "return", "N", "final_gdl", "success"], &rows)?;
    out.json("policy.json", &Checkpoint::from_policy(&hash, &trained.policy, &trained.value).with_seed(cfg.seed))?;

    let initial = train(&graphs, &graphdistill::policy::TrainConfig { iters: 0, ..cfg.train.clone() }, &scorer, cfg.seed, None)?;
    let tasks = build_tasks(&graphs, &cfg.train, cfg.seed)?;
    let space = ActionSpace::standard();
    let prompt = vec![0.0; cfg.train.prompt_dim];
    let eval_seed = cfg.seed.wrapping_add(0x0e7a1);
    let mut eval_rows = Vec::new();
    let mut report = Vec::new();
    for (name, params) in [("initial", &initial.policy), ("final", &trained.policy)] {
        let s = evaluate(
            &space,
            params,
            &prompt,
            &tasks,
            cfg.policy.eval_episodes,
            cfg.train.eval_temperature,
            &cfg.train.env,
            &scorer,
            eval_seed,
        )?;
        report.push(format!("{name}: success {:.3}, N {:.2}, GDL {:.3}", s.success_rate, s.mean_n, s.mean_final_gdl));
        eval_rows.push(vec![
            name.to_string(),
            s.episodes.to_string(),
            num(s.success_rate),
            num(s.mean_n),
            num(s.mean_final_gdl),
            num(s.mean_return),
        ]);
    }
    out.table("evaluation.tsv", &["policy", "episodes", "success", "N", "final_gdl", "return"], &eval_rows)?;
    out.timings(&[("train".into(), train_secs), ("total".into(), t0.elapsed().as_secs_f64())])?;
    if trained.skipped_updates > 0 {
        report.push(format!("{} diverged updates skipped", trained.skipped_updates));
    }
    Ok(format!("{} iterations; {}", cfg.train.iters, report.join("; ")))
}

/// `adapt`: fits a test-time adapter for the test graph against a frozen checkpoint.
pub fn adapt_cmd(cfg: &RunConfig, out: &Output) -> Result<String, CliError> {
    let t0 = Instant::now();
    let source = cfg.test_graph.as_ref().unwrap_or(&cfg.graph);
    let g = source.load(if cfg.test_graph.is_some() { "test_graph" } else { "graph" })?.swap_remove(0);
    let scorer = Scorer::new(cfg.scorer.clone());
    let env = &cfg.train.env;
    let ck_path = checkpoint_path(cfg, out);
    let digest_before = file_digest(&ck_path)?;
    let policy = load_policy(&ck_path, out.hash())?;
    let z = fingerprint(&g, &cfg.stta.fingerprint)?;
    let psi0 = cfg.stta.initial_adapter();
    let held = generate_aux_queries(&g, cfg.stta.k, cfg.adapt.held_out_seed)?;
    let n_seed = cfg.seed.wrapping_add(0x4e1d);
    let n_before = mean_chain_length(&policy, &psi0.forward(&z.values)?, &g, &held, cfg.adapt.rollouts, env, &scorer, n_seed)?;
    let mut hook = |r: &AdaptRow| log::info!("step {:3}: loss {:.4}  N {:.3}  KL {:.4}", r.step, r.loss, r.mean_n, r.mean_kl);
    let res = adapt(&psi0, g.clone(), &z, &policy, env, &scorer, &cfg.stta, Some(&mut hook))?;
    let n_after = mean_chain_length(&policy, &res.adapter.forward(&z.values)?, &g, &held, cfg.adapt.rollouts, env, &scorer, n_seed)?;
    let digest_after = file_digest(&ck_path)?;
    if digest_before != digest_after || res.policy_digest_before != res.policy_digest_after {
        return Err(CliError::Runtime("base policy changed during adaptation".into()));
    }
    out.json("adapter.json", &res.adapter.to_checkpoint(out.hash()).with_seed(cfg.seed))?;
    let rows: Vec<Vec<String>> = res
        .curve
        .iter()
        .map(|r| vec![r.step.to_string(), num(r.loss), num(r.mean_n), num(r.mean_kl), num(r.lr)])
        .collect();
    out.table("adapt_curve.tsv", &["step", "loss", "N", "kl", "lr"], &rows)?;
    out.table(
        "adapt_summary.tsv",
        &["held_out_queries", "N_before", "N_after", "policy_digest", "checkpoint_sha256_before", "checkpoint_sha256_after"],
        &[vec![
            held.len().to_string(),
            num(n_before),
            num(n_after),
            res.policy_digest_after.clone(),
            digest_before.clone(),
            digest_after,
        ]],
    )?;
    out.timings(&[("adapt".into(), t0.elapsed().as_secs_f64())])?;
    Ok(format!(
        "mean N on {} held-out queries: {n_before:.3} -> {n_after:.3}\nbase policy unchanged (checkpoint sha256 {digest_before})",
        held.len()
    ))
}

/// Graph for `fingerprint`: an explicit edge list, else the first configured graph.
pub fn fingerprint_cmd(cfg: &RunConfig, out: &Output, graph: Option<(&Path, bool, bool)>, m: Option<usize>) -> Result<String, CliError> {
    let t0 = Instant::now();
    let g: Arc<Graph> = match graph {
        Some((p, directed, weighted)) => Arc::new(load_edge_list(p, directed, weighted).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?),
        None => cfg.graph.load("graph")?.swap_remove(0),
    };
    let mut fc = cfg.stta.fingerprint.clone();
    if let Some(m) = m {
        fc.m = m;
    }
    let load_secs = t0.elapsed().as_secs_f64();
    let fp = fingerprint(&g, &fc)?;
    let rows: Vec<Vec<String>> = fp
        .values
        .iter()
        .zip(&fp.residuals)
        .enumerate()
        .map(|(k, (v, r))| vec![k.to_string(), num(*v), num(*r)])
        .collect();
    out.table("fingerprint.tsv", &["k", "value", "residual"], &rows)?;
    out.timings(&[("load".into(), load_secs), ("fingerprint".into(), t0.elapsed().as_secs_f64() - load_secs)])?;
    Ok(format!(
        "{} nodes, {} edges, graph {}: {} values in {} matvecs",
        g.node_count(),
        g.edge_count(),
        fp.graph_hash,
        fp.values.len(),
        fp.matvecs
    ))
}

/// Result of one scale run.
#[derive(Debug, Clone)]
pub struct ScaleRun {
    pub nodes: usize,
    pub edges: usize,
    pub trajectory: Trajectory,
    pub max_description: usize,
    pub digest: String,
}

/// Scripted five-call chain on a preferential-attachment graph with `n` nodes.
pub fn scale_run(n: usize, attach: usize, seed: u64, env: &EnvConfig, scorer: &Scorer) -> Result<ScaleRun, CliError> {
    let mut spec = GraphGenSpec::new(GraphFamily::BarabasiAlbert { n, m: attach }, seed);
    spec.feature_columns = 1;
    let g = Arc::new(generate_synthetic(&spec)?);
    let q = graphdistill::env::generate_tasks(&g, &[TaskTemplate::MaxFeatureInNeighborhood], 1, seed)?
        .pop()
        .ok_or_else(|| CliError::Runtime(format!("no neighbourhood query on the {n}-node graph")))?;
    let mut pol = ScriptedPolicy::new(scale_chain(&q)?);
    let t = run_episode(&mut pol, g.clone(), Arc::new(q), env, scorer, seed)?;
    let log = TrajectoryLog::digest_only(RunMeta { seed, config_hash: String::new() });
    log.append(0, &t)?;
    Ok(ScaleRun {
        nodes: g.node_count(),
        edges: g.edge_count(),
        max_description: t.records.iter().map(|r| r.description.chars().count()).max().unwrap_or(0),
        digest: log.digest(),
        trajectory: t,
    })
}

/// `bench`: scale runs over `bench.sizes`, optionally with a fingerprint per size.
pub fn bench(cfg: &RunConfig, out: &Output, with_fingerprint: bool) -> Result<String, CliError> {
    let scorer = Scorer::new(cfg.scorer.clone());
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut lines = Vec::new();
    for &n in &cfg.bench.sizes {
        let t0 = Instant::now();
        let r = scale_run(n, cfg.bench.attach, cfg.seed, &cfg.train.env, &scorer)?;
        let secs = t0.elapsed().as_secs_f64();
        timings.push((format!("chain_{n}"), secs));
        let t = &r.trajectory;
        rows.push(vec![
            r.nodes.to_string(),
            r.edges.to_string(),
            t.len().to_string(),
            r.max_description.to_string(),
            num(t.records.first().map_or(0.0, |x| x.reward.gdl_before)),
            num(t.final_gdl()),
            t.terminal_eval.to_string(),
            r.digest.clone(),
        ]);
        lines.push(format!("n={n}: {} steps, success {}, chain {secs:.2}s", t.len(), t.terminal_eval));
        if with_fingerprint {
            let mut spec = GraphGenSpec::new(GraphFamily::BarabasiAlbert { n, m: cfg.bench.attach }, cfg.seed);
            spec.feature_columns = 1;
            let g = generate_synthetic(&spec)?;
            let t0 = Instant::now();
            fingerprint(&g, &cfg.stta.fingerprint)?;
            timings.push((format!("fingerprint_{n}"), t0.elapsed().as_secs_f64()));
        }
    }
    out.table(
        "bench.tsv",
        &["nodes", "edges", "steps", "max_description", "gdl_initial", "gdl_final", "success", "digest"],
        &rows,
    )?;
    out.timings(&timings)?;
    Ok(lines.join("\n"))
}
