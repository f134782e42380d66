//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! terminal. Pass substrings (`c3`, `c8`, …) as arguments to run a subset:
//! `cargo test -p graphdistill-cli --test acceptance -- c5 c9`.

#[path = "../../core/tests/support/brute.rs"]
mod brute;
#[path = "../../core/tests/support/episodes.rs"]
mod episodes;
#[path = "../../core/tests/support/gradcheck.rs"]
mod gradcheck;
#[path = "../../core/tests/support/tables.rs"]
mod tables;

use graphdistill::diagnostics::{dpi_bound_check, information_check, InfoCheckConfig};
use graphdistill::distill::gdl_counts;
use graphdistill::env::planted_graphs;
use graphdistill::graph::{generate_synthetic, GraphFamily, GraphGenSpec};
use graphdistill::policy::{
    bandit_curve, build_tasks, evaluate, gae, policy_probs, train, ActionSpace, Checkpoint, PolicyParams, PpoConfig, TrainConfig,
    TrainOutput, FEATURE_DIM,
};
use graphdistill::stta::{adapt, fingerprint, generate_aux_queries, mean_chain_length, FingerprintConfig, SttaConfig};
use graphdistill::tools::{ParamValue, Params, Payload, ToolCategory};
use graphdistill::{invoke, registry, step_reward, Graph, GdlWeights, MemoryState, RewardWeights, Scorer};
use graphdistill_cli::commands;
use graphdistill_cli::config::{GraphSource, RunConfig};
use graphdistill_cli::Output;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

// Tolerances and budgets.
const ORACLE_TOL: f64 = 1e-12;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const SPECTRUM_TOL: f64 = 1e-8;
const SCALE_NODES: usize = 200_000;
const SCALE_BUDGET: Duration = Duration::from_secs(600);
const SCALE_MEMORY_KB: u64 = 8 * 1024 * 1024;
const DESCRIPTION_BUDGET: usize = 512;
const TANH_TOL: f64 = 1e-6;
const RECOMPUTE_TOL: f64 = 1e-12;
const GAE_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-6;
const BANDIT_TARGET: f64 = 0.95;
const BANDIT_BUDGET: Duration = Duration::from_secs(30);
const TRAIN_START_MAX: f64 = 0.2;
const TRAIN_END_MIN: f64 = 0.8;
const TRAIN_BUDGET: Duration = Duration::from_secs(600);
const DPI_TOL: f64 = 1e-10;
const NEUTRAL_TOL: f64 = 1e-12;
const STTA_BUDGET: Duration = Duration::from_secs(300);

/// Results shared between criteria (the planted policy feeds the adaptation demo).
#[derive(Default)]
struct Shared {
    planted: Option<TrainOutput>,
}

type Verdict = Result<(bool, String), String>;

fn planted_train_config() -> TrainConfig {
    TrainConfig::default()
}

fn planted_policy(shared: &mut Shared) -> Result<(&TrainOutput, Duration), String> {
    let t0 = Instant::now();
    if shared.planted.is_none() {
        let graphs = planted_graphs(8, 30, 0.1, 100).map_err(|e| e.to_string())?;
        let out = train(&graphs, &planted_train_config(), &Scorer::heuristic(), 7, None).map_err(|e| e.to_string())?;
        shared.planted = Some(out);
    }
    Ok((shared.planted.as_ref().unwrap(), t0.elapsed()))
}

fn c1_tool_oracles(_: &mut Shared) -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let t = brute::Tiny::random(&mut rng, 12);
        worst = worst.max(brute::check_tools(&t, 3, &mut rng, ORACLE_TOL).map_err(|m| format!("graph {i}: {m}"))?);
    }
    let el = t0.elapsed();
    Ok((el < ORACLE_BUDGET, format!("200 graphs (n <= 12), max deviation {worst:.1e}, {:.1}s", el.as_secs_f64())))
}

/// Normalized Laplacian spectrum by a dense symmetric eigensolve.
fn dense_spectrum(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v, w) in edges {
        a[(u, v)] = a[(u, v)].max(w);
        a[(v, u)] = a[(u, v)];
    }
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let mut l = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] != 0.0 {
                l[(i, j)] -= a[(i, j)] / (d[i] * d[j]).sqrt();
            }
        }
    }
    let mut ev: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c2_fingerprint(_: &mut Shared) -> Verdict {
    let cfg = FingerprintConfig { m: 16, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(17..=500);
        let family = match i % 3 {
            0 => GraphFamily::ErdosRenyi { n, p: (rng.random_range(2.0..8.0) / n as f64).min(1.0) },
            1 => GraphFamily::BarabasiAlbert { n, m: rng.random_range(1..=3) },
            _ => {
                let b = n / 3;
                GraphFamily::StochasticBlock { sizes: vec![b, b, n - 2 * b], p_in: 0.3, p_out: 0.01 }
            }
        };
        let g = generate_synthetic(&GraphGenSpec::new(family, i)).map_err(|e| e.to_string())?;
        let edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect();
        let f = fingerprint(&g, &cfg).map_err(|e| format!("graph {i}: {e}"))?;
        worst = worst.max(max_gap(&f.values, &dense_spectrum(g.node_count(), &edges)));
    }
    // K_n: 0 once, n/(n-1) with multiplicity n-1.
    let n = 40;
    let kn = Graph::new(n, false, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)))).map_err(|e| e.to_string())?;
    let f = fingerprint(&kn, &cfg).map_err(|e| e.to_string())?;
    let mut expect = vec![n as f64 / (n - 1) as f64; 17];
    expect[0] = 0.0;
    let kn_gap = max_gap(&f.values, &expect);
    // Two copies of K_6 and a 10-node path: the union of their spectra.
    let mut edges = Vec::new();
    for base in [0, 6] {
        edges.extend((0..6).flat_map(|i| (i + 1..6).map(move |j| (base + i, base + j, 1.0))));
    }
    edges.extend((12..21).map(|i| (i, i + 1, 1.0)));
    let g = Graph::new(22, false, edges).map_err(|e| e.to_string())?;
    let mut expect: Vec<f64> = vec![0.0, 0.0];
    expect.extend([1.2; 10]);
    expect.extend((0..10).map(|k| 1.0 - (std::f64::consts::PI * k as f64 / 9.0).cos()));
    expect.sort_by(f64::total_cmp);
    let f = fingerprint(&g, &cfg).map_err(|e| e.to_string())?;
    let comp_gap = max_gap(&f.values, &expect[..17]);
    Ok((
        worst <= SPECTRUM_TOL && kn_gap <= SPECTRUM_TOL && comp_gap <= SPECTRUM_TOL,
        format!("100 graphs max |dense - lanczos| {worst:.1e}; K_40 {kn_gap:.1e}; 2xK_6+P_10 {comp_gap:.1e}"),
    ))
}

/// Peak resident set of this process, from /proc.
fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn c3_scale(_: &mut Shared) -> Verdict {
    let t0 = Instant::now();
    let run = commands::scale_run(SCALE_NODES, 3, 11, &Default::default(), &Scorer::heuristic()).map_err(|e| e.to_string())?;
    let chain = t0.elapsed();
    let mut spec = GraphGenSpec::new(GraphFamily::BarabasiAlbert { n: SCALE_NODES, m: 3 }, 11);
    spec.feature_columns = 1;
    let g = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let t1 = Instant::now();
    let f = fingerprint(&g, &FingerprintConfig::default()).map_err(|e| e.to_string())?;
    let fp = t1.elapsed();
    let peak = peak_rss_kb();
    let tool_steps = run.trajectory.len() - 1;
    let pass = chain < SCALE_BUDGET
        && fp < SCALE_BUDGET
        && peak.is_some_and(|p| p < SCALE_MEMORY_KB)
        && run.max_description <= DESCRIPTION_BUDGET
        && tool_steps == 5
        && f.values.len() == 17;
    Ok((
        pass,
        format!(
            "{} nodes / {} edges: chain of {tool_steps} calls {:.1}s (success {}), fingerprint {:.1}s, peak RSS {} MB, longest description {}",
            run.nodes,
            run.edges,
            chain.as_secs_f64(),
            run.trajectory.terminal_eval,
            fp.as_secs_f64(),
            peak.map_or("?".into(), |p| (p / 1024).to_string()),
            run.max_description
        ),
    ))
}

fn c4_rewards(_: &mut Shared) -> Verdict {
    let w = RewardWeights::default();
    let gdl_ok = gdl_counts(4, 10, 3, &GdlWeights { alpha_s: 1.0, alpha_f: 1.0 }) == 22.0;
    let unit = RewardWeights { w1: 1.0, w2: 1.0, w3: 1.0, ..Default::default() };
    let unit_ok = step_reward(7.0, 7.0, 0.3, 0.3, true, &unit).total == 1.0;
    let up = step_reward(100.0, 50.0, 0.0, 0.0, true, &w).delta_gdl;
    let down = step_reward(50.0, 100.0, 0.0, 0.0, true, &w).delta_gdl;
    let tanh_ok = (up - 0.462117).abs() < TANH_TOL && (down + 0.761594).abs() < TANH_TOL;
    let log = episodes::random_policy_log(1000, 4);
    let text = String::from_utf8(log.contents()).map_err(|e| e.to_string())?;
    let a = episodes::audit(&text, &w);
    let replay_ok = a.skipped == 0 && a.records == log.line_count() && a.max_recompute_error <= RECOMPUTE_TOL;
    Ok((
        gdl_ok && unit_ok && tanh_ok && replay_ok,
        format!(
            "GDL example {gdl_ok}, unit step {unit_ok}, tanh {up:.6}/{down:.6}; 1000 episodes / {} records, max recompute error {:.1e}",
            a.records, a.max_recompute_error
        ),
    ))
}

fn c5_gae_ppo(_: &mut Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gae_gap = 0.0f64;
    for _ in 0..200 {
        let len = rng.random_range(1..40);
        let gamma = rng.random_range(0.5..1.0);
        let r: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a = gae(&r, &vec![0.0; len + 1], gamma, 1.0).map_err(|e| e.to_string())?;
        for t in 0..len {
            let rtg: f64 = (t..len).map(|k| gamma.powi((k - t) as i32) * r[k]).sum();
            gae_gap = gae_gap.max((a[t] - rtg).abs() / (1.0 + rtg.abs()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let fd = (0..50).map(|_| gradcheck::max_fd_error(&gradcheck::random_instance(&mut rng), 1e-5)).fold(0.0, f64::max);
    let t0 = Instant::now();
    let curve = bandit_curve(&[1.0, 0.0], &PpoConfig::default(), 200, 7).map_err(|e| e.to_string())?;
    let el = t0.elapsed();
    let hit = curve.iter().position(|&p| p >= BANDIT_TARGET);
    Ok((
        gae_gap <= GAE_TOL && fd <= FD_TOL && hit.is_some() && el < BANDIT_BUDGET,
        format!(
            "GAE(λ=1, V=0) gap {gae_gap:.1e}; 50 gradient checks max error {fd:.1e}; bandit P >= {BANDIT_TARGET} after {} updates ({:.2}s)",
            hit.map_or("never".into(), |h| (h + 1).to_string()),
            el.as_secs_f64()
        ),
    ))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

fn c6_planted_training(shared: &mut Shared) -> Verdict {
    let (out, el) = planted_policy(shared)?;
    let cfg = planted_train_config();
    let graphs = planted_graphs(8, 30, 0.1, 100).map_err(|e| e.to_string())?;
    let tasks = build_tasks(&graphs, &cfg, 7).map_err(|e| e.to_string())?;
    let initial = train(&graphs, &TrainConfig { iters: 0, ..cfg.clone() }, &Scorer::heuristic(), 7, None).map_err(|e| e.to_string())?;
    let space = ActionSpace::standard();
    let prompt = vec![0.0; cfg.prompt_dim];
    let eval = |p: &PolicyParams| {
        evaluate(&space, p, &prompt, &tasks, 128, cfg.eval_temperature, &cfg.env, &Scorer::heuristic(), 99).map_err(|e| e.to_string())
    };
    let before = eval(&initial.policy)?;
    let after = eval(&out.policy)?;
    let q = out.curve.len() / 4;
    let gdl: Vec<f64> = out.curve.iter().map(|r| r.mean_final_gdl).collect();
    let (first, last) = (mean(&gdl[..q]), mean(&gdl[gdl.len() - q..]));
    Ok((
        out.curve.len() == 300 && before.success_rate <= TRAIN_START_MAX && after.success_rate >= TRAIN_END_MIN && last <= first && el < TRAIN_BUDGET,
        format!(
            "success {:.3} -> {:.3} (eval T={}), GDL quartiles {first:.2} -> {last:.2}, final mean N {:.2}, {} iters in {:.1}s",
            before.success_rate,
            after.success_rate,
            cfg.eval_temperature,
            after.mean_n,
            out.curve.len(),
            el.as_secs_f64()
        ),
    ))
}

fn c7_information(_: &mut Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_slack = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..500 {
        let t = tables::random_markov_table(&mut rng);
        let r = dpi_bound_check(&t, "y", "ir", "x", "m").map_err(|e| e.to_string())?;
        worst_slack = worst_slack.min(r.i_x_m - r.i_yir_m).min(r.i_x_m - r.i_y_m - r.i_ir_m_given_y);
        failures += usize::from(!r.passed());
    }
    let info = information_check(&InfoCheckConfig::default(), &Scorer::heuristic(), 3).map_err(|e| e.to_string())?;
    Ok((
        failures == 0 && worst_slack >= -DPI_TOL && info.mi_improved && info.gdl_improved,
        format!(
            "500 tables, {failures} failures, min slack {worst_slack:.1e}; toy MDP ({} episodes) MI {:.3} vs {:.3} bits, GDL {:.2} vs {:.2} (trained vs random)",
            InfoCheckConfig::default().episodes,
            info.trained.mi_bits,
            info.random.mi_bits,
            info.trained.mean_final_gdl,
            info.random.mean_final_gdl
        ),
    ))
}

fn policy_bytes(p: &PolicyParams) -> Vec<u8> {
    let mut b: Vec<u8> = p.theta.iter().flat_map(|v| v.to_bits().to_le_bytes()).collect();
    b.extend(p.temperature.to_bits().to_le_bytes());
    b
}

fn c8_stta(shared: &mut Shared) -> Verdict {
    let (trained, _) = planted_policy(shared)?;
    let policy = trained.policy.clone();
    let env = planted_train_config().env;
    let scorer = Scorer::heuristic();
    let cfg = SttaConfig { k: 5, r: 3, lr: 0.01, ..Default::default() };
    let mut spec = GraphGenSpec::new(GraphFamily::StochasticBlock { sizes: vec![15, 15, 15], p_in: 0.4, p_out: 0.02 }, 3);
    spec.feature_columns = 1;
    let g = Arc::new(generate_synthetic(&spec).map_err(|e| e.to_string())?);
    let t0 = Instant::now();
    let before_bytes = policy_bytes(&policy);
    let before_json = serde_json::to_vec(&Checkpoint::from_policy("c8", &policy, &trained.value)).map_err(|e| e.to_string())?;
    let z = fingerprint(&g, &cfg.fingerprint).map_err(|e| e.to_string())?;
    let psi0 = cfg.initial_adapter();
    let p0 = psi0.forward(&z.values).map_err(|e| e.to_string())?;

    let space = ActionSpace::standard();
    let zero = vec![0.0; policy.prompt_dim];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut neutral_gap = 0.0f64;
    for _ in 0..500 {
        let f: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.random_range(-1.0..2.0)).collect();
        let mask: Vec<bool> = (0..space.len()).map(|i| i == 0 || rng.random::<bool>()).collect();
        let a = policy_probs(&policy, &f, &p0, &mask).map_err(|e| e.to_string())?;
        let b = policy_probs(&policy, &f, &zero, &mask).map_err(|e| e.to_string())?;
        neutral_gap = neutral_gap.max(max_gap(&a, &b));
    }

    let held = generate_aux_queries(&g, cfg.k, 999).map_err(|e| e.to_string())?;
    let n_before = mean_chain_length(&policy, &p0, &g, &held, 20, &env, &scorer, 5).map_err(|e| e.to_string())?;
    let res = adapt(&psi0, g.clone(), &z, &policy, &env, &scorer, &cfg, None).map_err(|e| e.to_string())?;
    let p1 = res.adapter.forward(&z.values).map_err(|e| e.to_string())?;
    let n_after = mean_chain_length(&policy, &p1, &g, &held, 20, &env, &scorer, 5).map_err(|e| e.to_string())?;
    let el = t0.elapsed();
    let frozen = before_bytes == policy_bytes(&policy)
        && before_json == serde_json::to_vec(&Checkpoint::from_policy("c8", &policy, &trained.value)).map_err(|e| e.to_string())?
        && res.policy_digest_before == res.policy_digest_after;
    Ok((
        n_after < n_before && frozen && neutral_gap <= NEUTRAL_TOL && el < STTA_BUDGET,
        format!(
            "held-out mean N {n_before:.3} -> {n_after:.3} over {} queries; base bytes identical {frozen}; zero-adapter gap {neutral_gap:.1e}; {:.1}s",
            held.len(),
            el.as_secs_f64()
        ),
    ))
}

fn fixture_rows() -> Result<BTreeSet<(String, String)>, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/function_table.tsv");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = BTreeSet::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (cat, func) = line.split_once('\t').ok_or_else(|| format!("malformed fixture line {line:?}"))?;
        if !rows.insert((cat.to_string(), func.to_string())) {
            return Err(format!("duplicate fixture row {line:?}"));
        }
    }
    Ok(rows)
}

fn c9_registry(_: &mut Shared) -> Verdict {
    let reg = registry();
    let fixture = fixture_rows()?;
    let mapped: BTreeSet<(String, String)> = reg
        .iter()
        .filter(|t| t.category != ToolCategory::Extraction)
        .map(|t| (t.category.name().to_string(), t.origin.clone()))
        .collect();
    let library = reg.iter().filter(|t| t.category != ToolCategory::Extraction).count();
    let extraction: Vec<&str> = reg.iter().filter(|t| t.category == ToolCategory::Extraction).map(|t| t.tool_id.as_str()).collect();
    let missing: Vec<_> = fixture.difference(&mapped).collect();
    let extra: Vec<_> = mapped.difference(&fixture).collect();

    let routing = Graph::new(5, true, [(0, 2, 3.0), (0, 3, 7.0), (1, 0, 2.0), (1, 4, 8.0), (2, 4, 1.0), (3, 4, 3.0)]).map_err(|e| e.to_string())?;
    let p: Params = [("source", 1u64), ("target", 4)].iter().map(|(k, v)| (k.to_string(), ParamValue::Int(*v))).collect();
    let r = invoke("dijkstra_path", &MemoryState::from_graph(Arc::new(routing)), &p).map_err(|e| e.to_string())?;
    let path_ok = matches!(&r.raw_payload, Payload::Path { nodes, length } if nodes == &[1, 0, 2, 4] && *length == 6.0);

    let cyc_edges = [(0, 1), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (4, 5)];
    let adj: BTreeSet<(usize, usize)> = cyc_edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    let g = Graph::new(6, false, cyc_edges.iter().map(|&(u, v)| (u, v, 1.0))).map_err(|e| e.to_string())?;
    let r = invoke("find_cycle", &MemoryState::from_graph(Arc::new(g)), &Params::new()).map_err(|e| e.to_string())?;
    let cycle_ok = match &r.raw_payload {
        Payload::Cycles { cycles, .. } => {
            !cycles.is_empty()
                && cycles.iter().all(|c| {
                    c.len() >= 3
                        && c.iter().collect::<BTreeSet<_>>().len() == c.len()
                        && (0..c.len()).all(|i| adj.contains(&(c[i], c[(i + 1) % c.len()])))
                })
        }
        _ => false,
    };
    let by_cat: BTreeMap<&str, usize> = reg.iter().fold(BTreeMap::new(), |mut m, t| {
        *m.entry(t.category.name()).or_default() += 1;
        m
    });
    Ok((
        library == 45 && fixture.len() == 45 && missing.is_empty() && extra.is_empty() && extraction.len() == 6 && path_ok && cycle_ok,
        format!(
            "{library} mapped functions ({} fixture rows, {} missing, {} unexpected), {} extraction tools, per category {by_cat:?}; path weight 6 {path_ok}; cycle {cycle_ok}",
            fixture.len(),
            missing.len(),
            extra.len(),
            extraction.len()
        ),
    ))
}

fn repro_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.seed = 13;
    let mut spec = GraphGenSpec::new(GraphFamily::ErdosRenyi { n: 30, p: 0.1 }, 100);
    spec.feature_columns = 1;
    cfg.graph = GraphSource { generate: Some(spec), count: 3, ..Default::default() };
    let mut test = GraphGenSpec::new(GraphFamily::StochasticBlock { sizes: vec![10, 10, 10], p_in: 0.4, p_out: 0.02 }, 3);
    test.feature_columns = 1;
    cfg.test_graph = Some(GraphSource { generate: Some(test), ..Default::default() });
    cfg.train.iters = 40;
    cfg.train.tasks_per_graph = 8;
    cfg.policy.eval_episodes = 16;
    cfg.stta.steps = 6;
    cfg.adapt.rollouts = 4;
    cfg
}

fn pipeline(cfg: &RunConfig, dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let out = Output::open(dir, &cfg.hash(), cfg.seed).map_err(|e| e.to_string())?;
    commands::train_cmd(cfg, &out).map_err(|e| e.to_string())?;
    commands::run(cfg, &out, None).map_err(|e| e.to_string())?;
    commands::adapt_cmd(cfg, &out).map_err(|e| e.to_string())?;
    commands::fingerprint_cmd(cfg, &out, None, Some(8)).map_err(|e| e.to_string())?;
    drop(out);
    let mut files = BTreeMap::new();
    for e in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        if p.is_file() && name != "timings.tsv" {
            files.insert(name, std::fs::read(&p).map_err(|e| e.to_string())?);
        }
    }
    Ok(files)
}

fn c10_reproducibility(_: &mut Shared) -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = repro_config();
    cfg.validate().map_err(|e| e.to_string())?;
    let a = pipeline(&cfg, &tmp.path().join("a"))?;
    let b = pipeline(&cfg, &tmp.path().join("b"))?;
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != Some(&a[*k])).collect();
    let same_names = a.keys().eq(b.keys());
    let mut other = cfg.clone();
    other.seed = 14;
    let c = pipeline(&other, &tmp.path().join("c"))?;
    let seed_matters = c.get("trajectory.jsonl") != a.get("trajectory.jsonl");
    let logs_equal = episodes::random_policy_log(100, 6).digest() == episodes::random_policy_log(100, 6).digest();
    Ok((
        same_names && differing.is_empty() && seed_matters && logs_equal && a.contains_key("trajectory.jsonl"),
        format!(
            "{} artifacts compared, {} differ {differing:?}; different seed changes the log {seed_matters}; log digests equal {logs_equal}",
            a.len(),
            differing.len()
        ),
    ))
}

type Criterion = (&'static str, &'static str, fn(&mut Shared) -> Verdict);

const CRITERIA: [Criterion; 10] = [
    ("c1", "tool oracles", c1_tool_oracles),
    ("c2", "fingerprint accuracy", c2_fingerprint),
    ("c3", "scale", c3_scale),
    ("c4", "reward arithmetic", c4_rewards),
    ("c5", "GAE and PPO", c5_gae_ppo),
    ("c6", "planted training", c6_planted_training),
    ("c7", "information diagnostics", c7_information),
    ("c8", "test-time adaptation", c8_stta),
    ("c9", "tool registry", c9_registry),
    ("c10", "reproducibility", c10_reproducibility),
];

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<&Criterion> = CRITERIA.iter().filter(|(id, ..)| filters.is_empty() || filters.iter().any(|f| f == id)).collect();
    let mut shared = Shared::default();
    let mut failed = 0;
    for (id, name, check) in &selected {
        let t0 = Instant::now();
        let (pass, detail) = match check(&mut shared) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} {:<4} {:<24} [{:>6.1}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            id,
            name,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", selected.len() - failed, selected.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
