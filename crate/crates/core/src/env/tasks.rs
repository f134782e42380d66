//! Query templates, seeded task generation, and answer extraction.

use super::oracle;
use super::Action;
use crate::distill::MemoryState;
use crate::error::EnvError;
use crate::graph::Graph;
use crate::tools::{ParamValue, Params, Payload};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Ground truths are computed by dense oracles; larger graphs skip the
/// quadratic-or-worse templates.
const DENSE_ORACLE_LIMIT: usize = 500;
const LINEAR_ORACLE_LIMIT: usize = 3_000;
/// Relative gap required between the best and runner-up centrality.
const TIE_GAP: f64 = 1e-9;
const REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskTemplate {
    MaxBetweennessNode,
    MaxClosenessNode,
    MaxDegreeNode,
    MaxHarmonicNode,
    ShortestPathLength,
    MaxFlowValue,
    CycleThroughNode,
    CommunityOfNode,
    ComponentCount,
    KHopNeighborCount,
    ArticulationPointSet,
    /// Largest `x0` within one hop of a node; the global maximum always lies
    /// outside that ball, so solving takes an extraction and a ranking step.
    MaxFeatureInNeighborhood,
}

impl TaskTemplate {
    pub const ALL: [TaskTemplate; 12] = [
        TaskTemplate::MaxBetweennessNode,
        TaskTemplate::MaxClosenessNode,
        TaskTemplate::MaxDegreeNode,
        TaskTemplate::MaxHarmonicNode,
        TaskTemplate::ShortestPathLength,
        TaskTemplate::MaxFlowValue,
        TaskTemplate::CycleThroughNode,
        TaskTemplate::CommunityOfNode,
        TaskTemplate::ComponentCount,
        TaskTemplate::KHopNeighborCount,
        TaskTemplate::ArticulationPointSet,
        TaskTemplate::MaxFeatureInNeighborhood,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&t| t == self).unwrap()
    }

    pub fn id(self) -> &'static str {
        match self {
            TaskTemplate::MaxBetweennessNode => "max-betweenness-node",
            TaskTemplate::MaxClosenessNode => "max-closeness-node",
            TaskTemplate::MaxDegreeNode => "max-degree-node",
            TaskTemplate::MaxHarmonicNode => "max-harmonic-node",
            TaskTemplate::ShortestPathLength => "shortest-path-length",
            TaskTemplate::MaxFlowValue => "max-flow-value",
            TaskTemplate::CycleThroughNode => "cycle-through-node",
            TaskTemplate::CommunityOfNode => "community-of-node",
            TaskTemplate::ComponentCount => "component-count",
            TaskTemplate::KHopNeighborCount => "k-hop-neighbor-count",
            TaskTemplate::ArticulationPointSet => "articulation-point-set",
            TaskTemplate::MaxFeatureInNeighborhood => "max-feature-in-neighborhood",
        }
    }

    /// Score column whose argmax is the answer, for the centrality templates.
    pub fn centrality_column(self) -> Option<&'static str> {
        match self {
            TaskTemplate::MaxBetweennessNode => Some("betweenness"),
            TaskTemplate::MaxClosenessNode => Some("closeness"),
            TaskTemplate::MaxDegreeNode => Some("degree_centrality"),
            TaskTemplate::MaxHarmonicNode => Some("harmonic"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Answer {
    Node(usize),
    Real(f64),
    Flag(bool),
    Count(usize),
    NodeSet(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub text: String,
    #[serde(rename = "template_id")]
    pub template: TaskTemplate,
    pub bindings: Params,
    pub ground_truth: Answer,
    /// Nodes the answer depends on; `None` means only a remote scorer can grade relevance.
    pub target_set: Option<Vec<usize>>,
    /// Score column whose presence in memory signals progress.
    pub designated_column: Option<String>,
}

const NODE_KEYS: [&str; 4] = ["node", "source", "target", "sink"];

impl Query {
    /// Node bindings in slot order (`node`, then `source`, `target`, `sink`).
    pub fn bound_nodes(&self) -> Vec<usize> {
        NODE_KEYS
            .iter()
            .filter_map(|k| match self.bindings.get(*k) {
                Some(ParamValue::Int(v)) => Some(*v as usize),
                _ => None,
            })
            .collect()
    }

    pub fn binding_int(&self, key: &str) -> Option<u64> {
        match self.bindings.get(key) {
            Some(ParamValue::Int(v)) => Some(*v),
            _ => None,
        }
    }
}

/// One successful tool call as seen by the answer extractors.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolOutput {
    pub tool_id: String,
    pub params: Params,
    pub payload: Payload,
}

fn argmax_unique(values: &[f64]) -> Option<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let best = *idx.first()?;
    if let Some(&second) = idx.get(1) {
        let gap = values[best] - values[second];
        if gap <= TIE_GAP * values[best].abs().max(1.0) {
            return None;
        }
    }
    Some(best)
}

fn int(v: usize) -> ParamValue {
    ParamValue::Int(v as u64)
}

fn params(pairs: &[(&str, ParamValue)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn weak_degree(g: &Graph, v: usize) -> usize {
    g.weak_neighbors(v).len()
}

fn build(template: TaskTemplate, text: String, bindings: Params, truth: Answer, target: Vec<usize>) -> Query {
    Query {
        text,
        template,
        bindings,
        ground_truth: truth,
        target_set: Some(target),
        designated_column: template.centrality_column().map(str::to_string),
    }
}

/// One attempt at instantiating `template` on `g`; `None` when the sampled
/// bindings (or the graph) do not admit a well-posed task.
fn sample(template: TaskTemplate, g: &Graph, rng: &mut ChaCha8Rng) -> Option<Query> {
    let n = g.node_count();
    if n < 2 {
        return None;
    }
    use TaskTemplate as T;
    match template {
        T::MaxBetweennessNode | T::MaxClosenessNode | T::MaxDegreeNode | T::MaxHarmonicNode => {
            let (scores, what) = match template {
                T::MaxBetweennessNode if n <= DENSE_ORACLE_LIMIT => (oracle::betweenness(g), "betweenness centrality"),
                T::MaxClosenessNode if n <= LINEAR_ORACLE_LIMIT => (oracle::closeness(g), "closeness centrality"),
                T::MaxHarmonicNode if n <= LINEAR_ORACLE_LIMIT => (oracle::harmonic(g), "harmonic centrality"),
                T::MaxDegreeNode => (oracle::degree_centrality(g), "degree centrality"),
                _ => return None,
            };
            let best = argmax_unique(&scores)?;
            Some(build(
                template,
                format!("Which node has the highest {what}?"),
                Params::new(),
                Answer::Node(best),
                vec![best],
            ))
        }
        T::ShortestPathLength => {
            if n > LINEAR_ORACLE_LIMIT || g.edges().iter().any(|e| e.weight < 0.0) {
                return None;
            }
            let s = rng.random_range(0..n);
            let dist = oracle::weighted_distances(g, s);
            let reachable: Vec<usize> = (0..n).filter(|&t| t != s && dist[t].is_finite()).collect();
            let &t = reachable.choose(rng)?;
            Some(build(
                template,
                format!("What is the total weight of the shortest path from node {s} to node {t}?"),
                params(&[("source", int(s)), ("target", int(t))]),
                Answer::Real(dist[t]),
                vec![s, t],
            ))
        }
        T::MaxFlowValue => {
            if n > DENSE_ORACLE_LIMIT || g.edges().iter().any(|e| e.weight < 0.0) {
                return None;
            }
            let s = rng.random_range(0..n);
            let t = rng.random_range(0..n);
            if s == t {
                return None;
            }
            let value = oracle::max_flow(g, s, t);
            if value <= 0.0 {
                return None;
            }
            Some(build(
                template,
                format!("What is the maximum flow value from node {s} to node {t}?"),
                params(&[("source", int(s)), ("sink", int(t))]),
                Answer::Real(value),
                vec![s, t],
            ))
        }
        T::CycleThroughNode => {
            if g.is_directed() || n > LINEAR_ORACLE_LIMIT {
                return None;
            }
            let v = rng.random_range(0..n);
            if weak_degree(g, v) == 0 {
                return None;
            }
            Some(build(
                template,
                format!("Does node {v} lie on a cycle?"),
                params(&[("node", int(v))]),
                Answer::Flag(oracle::on_cycle_undirected(g, v)),
                vec![v],
            ))
        }
        T::CommunityOfNode => {
            let comps = oracle::component_of(g);
            let distinct: BTreeSet<&Vec<usize>> = comps.iter().collect();
            if distinct.len() < 2 {
                return None;
            }
            let v = rng.random_range(0..n);
            let block = comps[v].clone();
            Some(build(
                template,
                format!("Which nodes share a connected component with node {v}?"),
                params(&[("node", int(v))]),
                Answer::NodeSet(block.clone()),
                block,
            ))
        }
        T::ComponentCount => Some(build(
            template,
            "How many weakly connected components does the graph have?".to_string(),
            Params::new(),
            Answer::Count(oracle::component_count(g)),
            Vec::new(),
        )),
        T::KHopNeighborCount => {
            let v = rng.random_range(0..n);
            let k = rng.random_range(1..=3usize);
            let ball = oracle::weak_ball(g, v, k);
            Some(build(
                template,
                format!("How many nodes lie within {k} hops of node {v}, ignoring direction?"),
                params(&[("node", int(v)), ("hops", int(k))]),
                Answer::Count(ball.len() - 1),
                ball,
            ))
        }
        T::ArticulationPointSet => {
            if n > LINEAR_ORACLE_LIMIT {
                return None;
            }
            let aps = oracle::articulation_points(g);
            Some(build(
                template,
                "Which nodes are articulation points?".to_string(),
                Params::new(),
                Answer::NodeSet(aps.clone()),
                aps,
            ))
        }
        T::MaxFeatureInNeighborhood => {
            let x0 = g.features().filter(|f| f.cols() > 0)?.column(0);
            let global = argmax_unique(&x0)?;
            let v = rng.random_range(0..n);
            let ball = oracle::weak_ball(g, v, 1);
            if ball.len() < 2 || ball.contains(&global) {
                return None;
            }
            let local: Vec<f64> = ball.iter().map(|&u| x0[u]).collect();
            let best = ball[argmax_unique(&local)?];
            Some(build(
                template,
                format!("Among node {v} and its neighbors, which has the largest x0?"),
                params(&[("node", int(v))]),
                Answer::Node(best),
                vec![best],
            ))
        }
    }
}

/// Draws `n` queries, cycling through `templates` in a seeded order.
/// Templates that repeatedly fail to instantiate on `g` are dropped with a warning.
pub fn generate_tasks(g: &Graph, templates: &[TaskTemplate], n: usize, seed: u64) -> Result<Vec<Query>, EnvError> {
    if templates.is_empty() && n > 0 {
        return Err(EnvError::Generation("no templates given".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live: Vec<TaskTemplate> = templates.to_vec();
    let mut failures = vec![0usize; live.len()];
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n && !live.is_empty() {
        let slot = i % live.len();
        i += 1;
        match sample(live[slot], g, &mut rng) {
            Some(q) => {
                failures[slot] = 0;
                out.push(q);
            }
            None => {
                failures[slot] += 1;
                if failures[slot] >= 64 {
                    log::warn!("template {} is unsatisfiable on this graph; skipping", live[slot].id());
                    live.remove(slot);
                    failures.remove(slot);
                }
            }
        }
    }
    if out.len() < n {
        return Err(EnvError::Generation(format!("produced {} of {n} requested tasks", out.len())));
    }
    Ok(out)
}

/// `k` queries over distinct templates where possible (a seeded shuffle of
/// the full template set, then repeats). Returns fewer, with a warning, when
/// the graph admits fewer.
pub fn sample_queries(g: &Graph, k: usize, seed: u64) -> Result<Vec<Query>, EnvError> {
    if k == 0 {
        return Err(EnvError::Validation("query count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = TaskTemplate::ALL.to_vec();
    order.shuffle(&mut rng);
    let mut usable = Vec::new();
    for t in order {
        if let Some(q) = (0..16).find_map(|_| sample(t, g, &mut rng)) {
            usable.push((t, q));
        }
    }
    if usable.is_empty() {
        return Err(EnvError::Generation("no template is satisfiable on this graph".into()));
    }
    let mut out: Vec<Query> = Vec::with_capacity(k);
    let mut round = 0;
    while out.len() < k {
        let (t, first) = &usable[out.len() % usable.len()];
        let q = if round == 0 {
            Some(first.clone())
        } else {
            (0..16).find_map(|_| sample(*t, g, &mut rng))
        };
        if let Some(q) = q {
            out.push(q);
        }
        if out.len().is_multiple_of(usable.len()) {
            round += 1;
        }
        if round > k {
            break;
        }
    }
    if out.len() < k {
        log::warn!("only {} of {k} queries could be generated", out.len());
    }
    Ok(out)
}

/// A tool chain (without the final TERMINATE) that solves `q` when the toolkit is correct.
pub fn scripted_chain(q: &Query) -> Vec<Action> {
    use TaskTemplate as T;
    let nodes = q.bound_nodes();
    let node = |i: usize| int(nodes[i]);
    let tool = |id: &str, p: Params| Action::Tool { tool_id: id.to_string(), params: p };
    match q.template {
        T::MaxBetweennessNode => vec![tool("betweenness_centrality", Params::new())],
        T::MaxClosenessNode => vec![tool("closeness_centrality", Params::new())],
        T::MaxDegreeNode => vec![tool("degree_centrality", Params::new())],
        T::MaxHarmonicNode => vec![tool("harmonic_centrality", Params::new())],
        T::ShortestPathLength => vec![tool("dijkstra_path", params(&[("source", node(0)), ("target", node(1))]))],
        T::MaxFlowValue => vec![tool("edmonds_karp_min_cut", params(&[("source", node(0)), ("sink", node(1))]))],
        T::CycleThroughNode => vec![tool("cycle_basis", Params::new())],
        T::CommunityOfNode | T::ComponentCount => vec![tool("weakly_connected_components", Params::new())],
        T::KHopNeighborCount => vec![tool(
            "k_hop_subgraph",
            params(&[("center", node(0)), ("hops", int(q.binding_int("hops").unwrap_or(1) as usize))]),
        )],
        T::ArticulationPointSet => vec![tool("articulation_points", Params::new())],
        T::MaxFeatureInNeighborhood => vec![
            tool("k_hop_subgraph", params(&[("center", node(0)), ("hops", int(1))])),
            tool(
                "top_k_by_score",
                params(&[("column", ParamValue::Text("x0".into())), ("k", int(1))]),
            ),
        ],
    }
}

fn latest(outputs: &[ToolOutput], pred: impl Fn(&ToolOutput) -> bool) -> Option<&ToolOutput> {
    outputs.iter().rev().find(|o| pred(o))
}

fn bound_eq(o: &ToolOutput, key: &str, q: &Query, qkey: &str) -> bool {
    matches!((o.params.get(key), q.bindings.get(qkey)), (Some(a), Some(b)) if a == b)
}

/// Extracts the agent's answer from the final memory and the payloads of its
/// successful calls, and compares it with the ground truth.
pub fn answer_matches(q: &Query, memory: &MemoryState, outputs: &[ToolOutput]) -> bool {
    use TaskTemplate as T;
    let truth = &q.ground_truth;
    match q.template {
        T::MaxBetweennessNode | T::MaxClosenessNode | T::MaxDegreeNode | T::MaxHarmonicNode => {
            let Some(col) = q.template.centrality_column().and_then(|c| memory.column(c)) else {
                return false;
            };
            argmax_unique(&col).map(|l| memory.original_of(l)).is_some_and(|v| *truth == Answer::Node(v))
        }
        T::ShortestPathLength => latest(outputs, |o| {
            matches!(o.tool_id.as_str(), "dijkstra_path" | "dijkstra_path_length")
                && bound_eq(o, "source", q, "source")
                && bound_eq(o, "target", q, "target")
        })
        .and_then(|o| match o.payload {
            Payload::Path { length, .. } | Payload::Scalar { value: length } => Some(length),
            _ => None,
        })
        .is_some_and(|len| matches!(truth, Answer::Real(t) if (len - t).abs() <= REAL_TOL)),
        T::MaxFlowValue => latest(outputs, |o| {
            matches!(o.payload, Payload::Cut { .. }) && bound_eq(o, "source", q, "source") && bound_eq(o, "sink", q, "sink")
        })
        .and_then(|o| match o.payload {
            Payload::Cut { value, .. } => Some(value),
            _ => None,
        })
        .is_some_and(|v| matches!(truth, Answer::Real(t) if (v - t).abs() <= REAL_TOL)),
        T::CycleThroughNode => {
            let Some(v) = q.bound_nodes().first().copied() else { return false };
            latest(outputs, |o| matches!(o.payload, Payload::Cycles { .. }))
                .and_then(|o| match &o.payload {
                    Payload::Cycles { cycles, truncated } => {
                        let hit = cycles.iter().any(|c| c.contains(&v));
                        // A truncated listing can confirm a cycle but not rule one out.
                        (hit || !truncated).then_some(hit)
                    }
                    _ => None,
                })
                .is_some_and(|a| *truth == Answer::Flag(a))
        }
        T::CommunityOfNode => {
            let Some(v) = q.bound_nodes().first().copied() else { return false };
            latest(outputs, |o| matches!(o.payload, Payload::Partition { .. }))
                .and_then(|o| match &o.payload {
                    Payload::Partition { blocks } => blocks.iter().find(|b| b.contains(&v)).map(|b| {
                        let mut b = b.clone();
                        b.sort_unstable();
                        b
                    }),
                    _ => None,
                })
                .is_some_and(|b| *truth == Answer::NodeSet(b))
        }
        T::ComponentCount => latest(outputs, |o| o.tool_id == "weakly_connected_components")
            .and_then(|o| match &o.payload {
                Payload::Partition { blocks } => Some(blocks.len()),
                _ => None,
            })
            .is_some_and(|c| *truth == Answer::Count(c)),
        T::KHopNeighborCount => memory.node_count() > 0 && *truth == Answer::Count(memory.node_count() - 1),
        T::ArticulationPointSet => latest(outputs, |o| o.tool_id == "articulation_points")
            .and_then(|o| match &o.payload {
                Payload::Nodes { nodes } => {
                    let mut n = nodes.clone();
                    n.sort_unstable();
                    Some(n)
                }
                _ => None,
            })
            .is_some_and(|n| *truth == Answer::NodeSet(n)),
        T::MaxFeatureInNeighborhood => {
            memory.node_count() == 1 && *truth == Answer::Node(memory.original_of(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_count_two_triangles() {
        let g = Graph::new(6, false, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]).unwrap();
        let qs = generate_tasks(&g, &[TaskTemplate::ComponentCount], 1, 0).unwrap();
        assert_eq!(qs[0].ground_truth, Answer::Count(2));
    }

    #[test]
    fn betweenness_on_path_is_middle() {
        let g = Graph::new(5, false, (1..5).map(|i| (i - 1, i, 1.0))).unwrap();
        let qs = generate_tasks(&g, &[TaskTemplate::MaxBetweennessNode], 1, 0).unwrap();
        assert_eq!(qs[0].ground_truth, Answer::Node(2));
    }

    #[test]
    fn generation_is_seeded() {
        let g = Graph::new(8, false, (1..8).map(|i| (i - 1, i, 1.0))).unwrap();
        let t = [TaskTemplate::KHopNeighborCount, TaskTemplate::ShortestPathLength];
        assert_eq!(generate_tasks(&g, &t, 10, 3).unwrap(), generate_tasks(&g, &t, 10, 3).unwrap());
    }

    #[test]
    fn unsatisfiable_template_errors() {
        // A connected graph has no community-of-node tasks under the component reading.
        let g = Graph::new(3, false, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(generate_tasks(&g, &[TaskTemplate::CommunityOfNode], 2, 0).is_err());
    }

    #[test]
    fn template_ids_round_trip() {
        for t in TaskTemplate::ALL {
            let s = serde_json::to_string(&t).unwrap();
            assert_eq!(s, format!("\"{}\"", t.id()));
        }
    }
}
