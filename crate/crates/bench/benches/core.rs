use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use graphdistill::env::{generate_tasks, planted_graphs, run_episode, ScriptedPolicy};
use graphdistill::graph::{generate_synthetic, GraphFamily, GraphGenSpec};
use graphdistill::policy::{gae, train, TrainConfig};
use graphdistill::stta::{fingerprint, FingerprintConfig};
use graphdistill::tools::{ParamValue, Params};
use graphdistill::{invoke, step_reward, EnvConfig, MemoryState, RewardWeights, Scorer, TaskTemplate};
use std::sync::Arc;

fn ba(n: usize) -> graphdistill::Graph {
    let mut spec = GraphGenSpec::new(GraphFamily::BarabasiAlbert { n, m: 3 }, 1);
    spec.feature_columns = 1;
    generate_synthetic(&spec).unwrap()
}

fn tools(c: &mut Criterion) {
    let mut group = c.benchmark_group("tools");
    for n in [500, 2000] {
        let m = MemoryState::from_graph(Arc::new(ba(n)));
        for tool in ["degree", "weakly_connected_components", "betweenness_centrality", "louvain_communities"] {
            group.bench_with_input(BenchmarkId::new(tool, n), &m, |b, m| b.iter(|| invoke(tool, m, &Params::new()).unwrap()));
        }
        let p: Params = [("source", 0u64), ("target", n as u64 - 1)].iter().map(|(k, v)| (k.to_string(), ParamValue::Int(*v))).collect();
        group.bench_with_input(BenchmarkId::new("dijkstra_path", n), &m, |b, m| b.iter(|| invoke("dijkstra_path", m, &p).unwrap()));
    }
    group.finish();
}

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("fingerprint");
    group.sample_size(10);
    for n in [1_000, 10_000] {
        let g = ba(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| fingerprint(g, &FingerprintConfig::default()).unwrap()));
    }
    group.finish();
}

fn episodes(c: &mut Criterion) {
    let g = Arc::new(ba(5_000));
    let q = Arc::new(generate_tasks(&g, &[TaskTemplate::MaxFeatureInNeighborhood], 1, 3).unwrap().remove(0));
    let env = EnvConfig::default();
    let scorer = Scorer::heuristic();
    c.bench_function("scripted_episode/5000", |b| {
        b.iter(|| run_episode(&mut ScriptedPolicy::for_query(&q), g.clone(), q.clone(), &env, &scorer, 0).unwrap())
    });
    let w = RewardWeights::default();
    c.bench_function("step_reward", |b| b.iter(|| step_reward(black_box(120.0), black_box(80.0), 0.2, 0.5, true, &w)));
}

fn learner(c: &mut Criterion) {
    let rewards: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
    let values: Vec<f64> = (0..17).map(|i| (i as f64 * 0.11).cos()).collect();
    c.bench_function("gae/16", |b| b.iter(|| gae(black_box(&rewards), &values, 0.99, 0.95).unwrap()));
    let graphs = planted_graphs(4, 30, 0.1, 100).unwrap();
    let cfg = TrainConfig { iters: 10, ..Default::default() };
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("planted/10_iters", |b| b.iter(|| train(&graphs, &cfg, &Scorer::heuristic(), 7, None).unwrap()));
    group.finish();
}

criterion_group!(benches, tools, spectral, episodes, learner);
criterion_main!(benches);
