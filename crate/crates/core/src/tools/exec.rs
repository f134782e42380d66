//! Parameter binding and per-tool execution.

use super::algo::{centrality, community, connectivity, cycles, flow, paths, topo};
use super::{
    list_preview, FlowEngine, ParamKind, ParamValue, Params, Payload, ToolSpec, ALL_PAIRS_NODE_LIMIT,
};
use crate::distill::MemoryState;
use crate::error::ToolError;
use crate::graph::Graph;
use std::collections::{BTreeMap, VecDeque};

/// Path-based centralities (one BFS per node) refuse larger subgraphs.
pub const CENTRALITY_NODE_LIMIT: usize = 20_000;
const SECOND_ORDER_NODE_LIMIT: usize = 200;
const SUBGRAPH_CENTRALITY_NODE_LIMIT: usize = 1_000;
const MAX_CYCLES: usize = 1_000;
const CYCLE_SEARCH_BUDGET: usize = 2_000_000;
const MAX_TOPO_ORDERS: usize = 100;
const PREVIEW: usize = 10;

pub(super) enum Effect {
    None,
    Column { name: String, values: Vec<f64> },
    Restrict(Vec<usize>),
    DropBaseFeatures,
}

pub(super) struct Outcome {
    pub fields: Vec<(&'static str, String)>,
    pub effect: Effect,
    pub payload: Payload,
}

#[derive(Debug, Clone)]
enum Bound {
    Node { original: usize, local: Option<usize> },
    NodeSet(Vec<usize>),
    Int(u64),
    Real(f64),
    Column(String),
}

pub(super) struct Args {
    values: BTreeMap<String, Bound>,
}

/// Tools whose node parameters may name nodes outside the current subgraph.
fn is_probe(tool: &str) -> bool {
    matches!(tool, "has_node" | "has_edge" | "get_edge_data")
}

impl Args {
    pub fn bind(spec: &ToolSpec, memory: &MemoryState, params: &Params) -> Result<Self, ToolError> {
        let tool = spec.tool_id.as_str();
        let err = |m: String| ToolError::param(tool, m);
        if let Some(extra) = params.keys().find(|k| !spec.param_schema.iter().any(|p| &p.name == *k)) {
            return Err(err(format!("unexpected parameter `{extra}`")));
        }
        let mut values = BTreeMap::new();
        for p in &spec.param_schema {
            let Some(v) = params.get(&p.name) else {
                if p.optional {
                    continue;
                }
                return Err(err(format!("missing parameter `{}`", p.name)));
            };
            let kind_err = || err(format!("`{}` expects a {:?} value, got {v:?}", p.name, p.kind));
            let bound = match (p.kind, v) {
                (ParamKind::Node, ParamValue::Int(id)) => {
                    let original = *id as usize;
                    let local = memory.local_of(original);
                    if local.is_none() && !is_probe(tool) {
                        return Err(err(format!("node {original} is not in the current subgraph")));
                    }
                    Bound::Node { original, local }
                }
                (ParamKind::NodeSet, ParamValue::NodeSet(ids)) => {
                    let mut local = Vec::with_capacity(ids.len());
                    for &id in ids {
                        match memory.local_of(id) {
                            Some(l) => local.push(l),
                            None => return Err(err(format!("node {id} is not in the current subgraph"))),
                        }
                    }
                    if local.is_empty() {
                        return Err(err(format!("`{}` is empty", p.name)));
                    }
                    local.sort_unstable();
                    local.dedup();
                    Bound::NodeSet(local)
                }
                (ParamKind::PositiveInt, ParamValue::Int(k)) => {
                    if *k == 0 {
                        return Err(err(format!("`{}` must be positive", p.name)));
                    }
                    Bound::Int(*k)
                }
                (ParamKind::Count, ParamValue::Int(k)) => Bound::Int(*k),
                (ParamKind::Real, ParamValue::Real(x)) if x.is_finite() => Bound::Real(*x),
                (ParamKind::Real, ParamValue::Int(k)) => Bound::Real(*k as f64),
                (ParamKind::Column, ParamValue::Text(name)) => {
                    if !memory.has_column(name) {
                        return Err(err(format!("no column named `{name}` in memory")));
                    }
                    Bound::Column(name.clone())
                }
                _ => return Err(kind_err()),
            };
            values.insert(p.name.clone(), bound);
        }
        Ok(Self { values })
    }

    fn node(&self, name: &str) -> (usize, Option<usize>) {
        match self.values.get(name) {
            Some(Bound::Node { original, local }) => (*original, *local),
            other => unreachable!("`{name}` bound as {other:?}"),
        }
    }

    fn local(&self, name: &str) -> usize {
        self.node(name).1.expect("non-probe nodes are present")
    }

    fn int(&self, name: &str) -> Option<u64> {
        match self.values.get(name) {
            Some(Bound::Int(k)) => Some(*k),
            None => None,
            other => unreachable!("`{name}` bound as {other:?}"),
        }
    }

    fn real(&self, name: &str) -> f64 {
        match self.values.get(name) {
            Some(Bound::Real(x)) => *x,
            other => unreachable!("`{name}` bound as {other:?}"),
        }
    }

    fn set(&self, name: &str) -> &[usize] {
        match self.values.get(name) {
            Some(Bound::NodeSet(s)) => s,
            other => unreachable!("`{name}` bound as {other:?}"),
        }
    }

    fn column(&self, name: &str) -> &str {
        match self.values.get(name) {
            Some(Bound::Column(c)) => c,
            other => unreachable!("`{name}` bound as {other:?}"),
        }
    }
}

/// Compact decimal rendering: integers without a fraction, otherwise up to 6 places.
pub(crate) fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Top-3 nodes by value (descending, or ascending when `lowest`), as original ids.
fn top3(memory: &MemoryState, values: &[f64], lowest: bool) -> String {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[b].total_cmp(&values[a]);
        (if lowest { ord.reverse() } else { ord }).then(a.cmp(&b))
    });
    let items: Vec<String> = idx
        .iter()
        .take(3)
        .map(|&v| format!("{} ({})", memory.original_of(v), fmt_num(values[v])))
        .collect();
    format!("[{}]", items.join(", "))
}

fn originals(memory: &MemoryState, local: &[usize]) -> Vec<usize> {
    local.iter().map(|&v| memory.original_of(v)).collect()
}

fn note(g: &Graph) -> String {
    if g.is_directed() {
        " (undirected view)".into()
    } else {
        String::new()
    }
}

fn count_induced_edges(g: &Graph, local: &[usize]) -> usize {
    let mut inside = vec![false; g.node_count()];
    for &v in local {
        inside[v] = true;
    }
    g.edges().iter().filter(|e| inside[e.src] && inside[e.dst]).count()
}

struct Ctx<'a> {
    tool: &'a str,
    memory: &'a MemoryState,
    g: &'a Graph,
}

impl Ctx<'_> {
    fn fail(&self, description: impl Into<String>) -> ToolError {
        ToolError::exec(self.tool, description)
    }

    fn nonempty(&self) -> Result<(), ToolError> {
        if self.g.node_count() == 0 {
            Err(self.fail("the current subgraph is empty"))
        } else {
            Ok(())
        }
    }

    fn at_most(&self, limit: usize) -> Result<(), ToolError> {
        self.nonempty()?;
        let n = self.g.node_count();
        if n > limit {
            Err(self.fail(format!(
                "the current subgraph has {n} nodes; this tool accepts at most {limit}. Extract a smaller subgraph first"
            )))
        } else {
            Ok(())
        }
    }

    fn nonnegative_weights(&self) -> Result<(), ToolError> {
        if paths::has_negative_weight(self.g) {
            Err(self.fail("negative edge weights are not supported"))
        } else {
            Ok(())
        }
    }

    fn directed_only(&self) -> Result<(), ToolError> {
        if self.g.is_directed() {
            Ok(())
        } else {
            Err(self.fail("topological order is undefined for undirected graphs"))
        }
    }

    fn scores(&self, column: &str, values: Vec<f64>, lowest: bool, mut extra: Vec<(&'static str, String)>) -> Outcome {
        let n = values.len();
        let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
        extra.push(("n", n.to_string()));
        extra.push(("top", top3(self.memory, &values, lowest)));
        extra.push(("mean", fmt_num(mean)));
        Outcome {
            fields: extra,
            effect: Effect::Column {
                name: column.to_string(),
                values,
            },
            payload: Payload::Scores {
                column: column.to_string(),
            },
        }
    }

    fn partition(&self, blocks: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<(&'static str, String)>) {
        let orig: Vec<Vec<usize>> = blocks.iter().map(|b| originals(self.memory, b)).collect();
        let largest = orig.iter().max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])));
        let fields = vec![
            ("count", orig.len().to_string()),
            ("largest", largest.map_or(0, Vec::len).to_string()),
            ("preview", largest.map_or_else(|| "[]".into(), |b| list_preview(b, PREVIEW))),
            ("note", note(self.g)),
        ];
        (orig, fields)
    }

    fn restrict(&self, local: Vec<usize>, mut fields: Vec<(&'static str, String)>) -> Outcome {
        let m = count_induced_edges(self.g, &local);
        let orig = originals(self.memory, &local);
        fields.push(("n", local.len().to_string()));
        fields.push(("m", m.to_string()));
        fields.push(("preview", list_preview(&orig, PREVIEW)));
        let effect = if local.len() == self.g.node_count() {
            Effect::None
        } else {
            Effect::Restrict(local.clone())
        };
        Outcome {
            fields,
            effect,
            payload: Payload::Subgraph {
                nodes: local.len(),
                edges: m,
            },
        }
    }
}

fn plain(fields: Vec<(&'static str, String)>, payload: Payload) -> Outcome {
    Outcome {
        fields,
        effect: Effect::None,
        payload,
    }
}

fn bfs_path(g: &Graph, s: usize, t: usize) -> Option<Vec<usize>> {
    let mut pred = vec![None; g.node_count()];
    let mut seen = vec![false; g.node_count()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for (u, _) in g.out_neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                pred[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    paths::path_to(&pred, s, t)
}

/// Summary of a row-major distance matrix: (reachable ordered pairs, diameter, mean, farthest pair).
fn distance_summary(n: usize, d: &[f64]) -> (usize, f64, f64, Option<(usize, usize)>) {
    let (mut pairs, mut sum, mut diam, mut far) = (0usize, 0.0, 0.0, None);
    for s in 0..n {
        for t in 0..n {
            let x = d[s * n + t];
            if s != t && x.is_finite() {
                pairs += 1;
                sum += x;
                if far.is_none() || x > diam {
                    diam = x;
                    far = Some((s, t));
                }
            }
        }
    }
    let mean = if pairs == 0 { 0.0 } else { sum / pairs as f64 };
    (pairs, diam, mean, far)
}

fn sizes_preview(blocks: &[Vec<usize>]) -> String {
    let mut sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    list_preview(&sizes, PREVIEW)
}

fn labels_to_blocks(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        blocks[l].push(v);
    }
    blocks
}

pub(super) fn run(spec: &ToolSpec, memory: &MemoryState, args: &Args) -> Result<Outcome, ToolError> {
    let g = memory.subgraph();
    let cx = Ctx {
        tool: spec.tool_id.as_str(),
        memory,
        g,
    };
    let n = g.node_count();
    let out = match cx.tool {
        // ---- basic ----
        "number_of_nodes" => plain(vec![("value", n.to_string())], Payload::Count { value: n }),
        "number_of_edges" => {
            let m = g.edge_count();
            plain(vec![("value", m.to_string())], Payload::Count { value: m })
        }
        "has_node" => {
            let (orig, local) = args.node("node");
            let present = local.is_some();
            plain(
                vec![("node", orig.to_string()), ("answer", if present { "in" } else { "not in" }.into())],
                Payload::Flag { value: present },
            )
        }
        "has_edge" | "get_edge_data" => {
            let (u, lu) = args.node("u");
            let (v, lv) = args.node("v");
            let weight = lu.zip(lv).and_then(|(a, b)| g.edge_weight(a, b));
            let answer = if cx.tool == "has_edge" {
                if weight.is_some() { "exists" } else { "does not exist" }.to_string()
            } else {
                weight.map_or_else(|| "no such edge".to_string(), |w| format!("weight {}", fmt_num(w)))
            };
            let fields = vec![("u", u.to_string()), ("v", v.to_string()), ("answer", answer)];
            if cx.tool == "has_edge" {
                plain(fields, Payload::Flag { value: weight.is_some() })
            } else {
                plain(fields, Payload::EdgeData { weight })
            }
        }
        "degree" => cx.scores("degree", (0..n).map(|v| g.degree(v) as f64).collect(), false, vec![]),
        "in_degree" => cx.scores("in_degree", (0..n).map(|v| g.in_degree(v) as f64).collect(), false, vec![]),
        "out_degree" => cx.scores("out_degree", (0..n).map(|v| g.out_degree(v) as f64).collect(), false, vec![]),

        // ---- centrality ----
        "betweenness_centrality" => {
            cx.at_most(CENTRALITY_NODE_LIMIT)?;
            cx.scores("betweenness", centrality::betweenness(g), false, vec![])
        }
        "closeness_centrality" => {
            cx.at_most(CENTRALITY_NODE_LIMIT)?;
            cx.scores("closeness", centrality::closeness(g), false, vec![])
        }
        "degree_centrality" => {
            cx.nonempty()?;
            cx.scores("degree_centrality", centrality::degree_centrality(g), false, vec![])
        }
        "harmonic_centrality" => {
            cx.at_most(CENTRALITY_NODE_LIMIT)?;
            cx.scores("harmonic", centrality::harmonic(g), false, vec![])
        }
        "eigenvector_centrality" => {
            cx.nonempty()?;
            let (x, lambda) = centrality::eigenvector(g, 10_000, 1e-12)
                .ok_or_else(|| cx.fail("power iteration did not converge"))?;
            cx.scores("eigenvector", x, false, vec![("lambda", fmt_num(lambda))])
        }
        "percolation_centrality" => {
            cx.at_most(CENTRALITY_NODE_LIMIT)?;
            let (states, label) = percolation_states(memory);
            cx.scores("percolation", centrality::percolation(g, &states), false, vec![("states", label)])
        }
        "second_order_centrality" => {
            cx.at_most(SECOND_ORDER_NODE_LIMIT)?;
            cx.nonnegative_weights()?;
            if connectivity::strongly_connected(g).len() != 1 {
                return Err(cx.fail("second-order centrality needs a strongly connected subgraph"));
            }
            let s = centrality::second_order(g).ok_or_else(|| cx.fail("singular random-walk system"))?;
            cx.scores("second_order", s, true, vec![])
        }
        "subgraph_centrality" => {
            cx.at_most(SUBGRAPH_CENTRALITY_NODE_LIMIT)?;
            cx.scores("subgraph_centrality", centrality::subgraph_centrality(g), false, vec![])
        }

        // ---- connectivity ----
        "strongly_connected_components" | "weakly_connected_components" => {
            let blocks = if cx.tool == "strongly_connected_components" {
                connectivity::strongly_connected(g)
            } else {
                super::algo::weak_components(g)
            };
            let (orig, fields) = cx.partition(&blocks);
            plain(fields, Payload::Partition { blocks: orig })
        }
        "articulation_points" | "bridges" => {
            let (points, bridges) = connectivity::articulation_points_and_bridges(g);
            if cx.tool == "articulation_points" {
                let orig = originals(memory, &points);
                plain(
                    vec![("count", orig.len().to_string()), ("note", note(g)), ("preview", list_preview(&orig, PREVIEW))],
                    Payload::Nodes { nodes: orig },
                )
            } else {
                let edges: Vec<(usize, usize, f64)> = bridges
                    .iter()
                    .map(|&(a, b)| {
                        let w = g.edge_weight(a, b).or_else(|| g.edge_weight(b, a)).unwrap_or(1.0);
                        (memory.original_of(a), memory.original_of(b), w)
                    })
                    .collect();
                let shown: Vec<String> = edges.iter().map(|(a, b, _)| format!("({a}, {b})")).collect();
                plain(
                    vec![("count", edges.len().to_string()), ("note", note(g)), ("preview", list_preview(&shown, PREVIEW))],
                    Payload::Edges { edges },
                )
            }
        }
        "k_edge_components" | "k_node_components" => {
            let k = args.int("k").expect("required") as usize;
            let heavy = if cx.tool == "k_edge_components" { k >= 3 } else { k >= 2 };
            if heavy {
                cx.at_most(ALL_PAIRS_NODE_LIMIT)?;
            }
            let blocks = if cx.tool == "k_edge_components" {
                connectivity::k_edge_components(g, k)
            } else {
                connectivity::k_node_components(g, k)
            };
            let (orig, mut fields) = cx.partition(&blocks);
            fields.push(("k", k.to_string()));
            plain(fields, Payload::Partition { blocks: orig })
        }
        "node_connectivity" | "edge_connectivity" => {
            cx.at_most(ALL_PAIRS_NODE_LIMIT)?;
            let value = if cx.tool == "node_connectivity" {
                connectivity::node_connectivity(g)
            } else {
                connectivity::edge_connectivity(g)
            };
            plain(vec![("value", value.to_string()), ("note", note(g))], Payload::Count { value })
        }

        // ---- shortest paths ----
        "all_pairs_shortest_path" | "all_pairs_shortest_path_length" | "floyd_warshall" => {
            cx.at_most(ALL_PAIRS_NODE_LIMIT)?;
            let values = if cx.tool == "floyd_warshall" {
                cx.nonnegative_weights()?;
                paths::all_pairs_weighted(g)
            } else {
                paths::all_pairs_hops(g)
            };
            let (pairs, diam, mean, far) = distance_summary(n, &values);
            let mut fields = vec![
                ("n", n.to_string()),
                ("pairs", pairs.to_string()),
                ("diameter", fmt_num(diam)),
                ("mean", fmt_num(mean)),
            ];
            if cx.tool == "all_pairs_shortest_path" {
                let example = far
                    .and_then(|(s, t)| bfs_path(g, s, t))
                    .map_or_else(|| "none".into(), |p| list_preview(&originals(memory, &p), PREVIEW));
                fields.push(("example", example));
            }
            plain(
                fields,
                Payload::Distances {
                    nodes: memory.original_ids().to_vec(),
                    values,
                },
            )
        }
        "dijkstra_path" | "dijkstra_path_length" => {
            cx.nonnegative_weights()?;
            let (s_orig, s) = (args.node("source").0, args.local("source"));
            let (t_orig, t) = (args.node("target").0, args.local("target"));
            let (dist, pred) = paths::dijkstra(g, s);
            let path = paths::path_to(&pred, s, t)
                .ok_or_else(|| cx.fail(format!("no path from {s_orig} to {t_orig} in the current subgraph")))?;
            let length = dist[t];
            let orig = originals(memory, &path);
            let shown: Vec<String> = orig.iter().map(ToString::to_string).collect();
            let fields = vec![
                ("source", s_orig.to_string()),
                ("target", t_orig.to_string()),
                ("path", crate::tools::truncate_chars(&shown.join(" -> "), 300)),
                ("length", fmt_num(length)),
            ];
            let payload = if cx.tool == "dijkstra_path" {
                Payload::Path { nodes: orig, length }
            } else {
                Payload::Scalar { value: length }
            };
            plain(fields, payload)
        }

        // ---- clustering and communities ----
        "average_clustering" | "transitivity" => {
            cx.nonempty()?;
            let adj = super::algo::undirected_adjacency(g);
            let value = if cx.tool == "transitivity" {
                community::transitivity(&adj)
            } else {
                community::clustering(&adj).iter().sum::<f64>() / n as f64
            };
            plain(vec![("value", fmt_num(value)), ("note", note(g))], Payload::Scalar { value })
        }
        "clustering" => {
            cx.nonempty()?;
            let c = community::clustering(&super::algo::undirected_adjacency(g));
            cx.scores("clustering", c, false, vec![("note", note(g))])
        }
        "triangles" => {
            cx.nonempty()?;
            let t = community::triangles(&super::algo::undirected_adjacency(g));
            let total: usize = t.iter().sum::<usize>() / 3;
            cx.scores(
                "triangles",
                t.into_iter().map(|x| x as f64).collect(),
                false,
                vec![("total", total.to_string()), ("note", note(g))],
            )
        }
        "label_propagation_communities" | "louvain_communities" => {
            cx.nonempty()?;
            let seed = args.int("seed").unwrap_or(0);
            let (labels, column, modularity) = if cx.tool == "louvain_communities" {
                let (l, q) = community::louvain(g, seed);
                (l, "community", Some(q))
            } else {
                (community::label_propagation(g, seed), "label_propagation", None)
            };
            let blocks = labels_to_blocks(&labels);
            let mut fields = vec![
                ("count", blocks.len().to_string()),
                ("sizes", sizes_preview(&blocks)),
                ("note", note(g)),
            ];
            if let Some(q) = modularity {
                fields.push(("modularity", fmt_num(q)));
            }
            Outcome {
                fields,
                effect: Effect::Column {
                    name: column.to_string(),
                    values: labels.iter().map(|&l| l as f64).collect(),
                },
                payload: Payload::Partition {
                    blocks: blocks.iter().map(|b| originals(memory, b)).collect(),
                },
            }
        }

        // ---- flow ----
        "boykov_kolmogorov_min_cut" | "dinic_min_cut" | "edmonds_karp_min_cut" | "minimum_cut" => {
            cx.nonnegative_weights()?;
            let (s_orig, s) = (args.node("source").0, args.local("source"));
            let (t_orig, t) = (args.node("sink").0, args.local("sink"));
            if s == t {
                return Err(ToolError::param(cx.tool, "source and sink must differ"));
            }
            let (engine, algo, label) = match cx.tool {
                "edmonds_karp_min_cut" => (FlowEngine::EdmondsKarp, flow::Engine::EdmondsKarp, "edmonds-karp"),
                "boykov_kolmogorov_min_cut" => (FlowEngine::BoykovKolmogorov, flow::Engine::Dinic, "boykov-kolmogorov via dinic"),
                _ => (FlowEngine::Dinic, flow::Engine::Dinic, "dinic"),
            };
            let cut = flow::min_cut(g, s, t, algo);
            let side = originals(memory, &cut.source_side);
            plain(
                vec![
                    ("source", s_orig.to_string()),
                    ("sink", t_orig.to_string()),
                    ("value", fmt_num(cut.value)),
                    ("engine", label.into()),
                    ("cut", cut.cut_edges.to_string()),
                    ("side", side.len().to_string()),
                ],
                Payload::Cut {
                    value: cut.value,
                    source_side: side,
                    cut_edges: cut.cut_edges,
                    engine,
                },
            )
        }

        // ---- cycles ----
        "simple_cycles" => {
            let exists = cycles::has_cycle(g);
            let (found, truncated) = cycles::simple_cycles(g, MAX_CYCLES, CYCLE_SEARCH_BUDGET);
            let found: Vec<Vec<usize>> = found.iter().map(|c| originals(memory, c)).collect();
            let example = found.first().map_or_else(|| "none".into(), |c| list_preview(c, PREVIEW));
            plain(
                vec![
                    ("answer", if exists { "A cycle exists" } else { "No cycle exists" }.into()),
                    ("count", found.len().to_string()),
                    ("more", if truncated { "+" } else { "" }.into()),
                    ("example", example),
                ],
                Payload::Cycles { cycles: found, truncated },
            )
        }
        "cycle_basis" => {
            let basis: Vec<Vec<usize>> = cycles::cycle_basis(g).iter().map(|c| originals(memory, c)).collect();
            let example = basis.first().map_or_else(|| "none".into(), |c| list_preview(c, PREVIEW));
            plain(
                vec![("count", basis.len().to_string()), ("note", note(g)), ("example", example)],
                Payload::Cycles { cycles: basis, truncated: false },
            )
        }

        // ---- topological ----
        "is_directed_acyclic_graph" => {
            let dag = g.is_directed() && !cycles::has_cycle(g);
            plain(vec![("answer", if dag { "is" } else { "is not" }.into())], Payload::Flag { value: dag })
        }
        "topological_sort" => {
            cx.directed_only()?;
            let order = topo::topological_sort(g).ok_or_else(|| cyclic(&cx))?;
            let orig = originals(memory, &order);
            plain(
                vec![("n", n.to_string()), ("order", list_preview(&orig, PREVIEW))],
                Payload::Orders { orders: vec![orig], truncated: false },
            )
        }
        "all_topological_sorts" => {
            cx.directed_only()?;
            let (orders, truncated) = topo::all_topological_sorts(g, MAX_TOPO_ORDERS).ok_or_else(|| cyclic(&cx))?;
            let orders: Vec<Vec<usize>> = orders.iter().map(|o| originals(memory, o)).collect();
            plain(
                vec![
                    ("count", orders.len().to_string()),
                    ("more", if truncated { "+" } else { "" }.into()),
                    ("order", orders.first().map_or_else(|| "[]".into(), |o| list_preview(o, PREVIEW))),
                ],
                Payload::Orders { orders, truncated },
            )
        }
        "topological_generations" => {
            cx.directed_only()?;
            let layers = topo::generations(g).ok_or_else(|| cyclic(&cx))?;
            let layers: Vec<Vec<usize>> = layers.iter().map(|l| originals(memory, l)).collect();
            let sizes: Vec<usize> = layers.iter().map(Vec::len).collect();
            plain(
                vec![
                    ("count", layers.len().to_string()),
                    ("sizes", list_preview(&sizes, PREVIEW)),
                    ("first", layers.first().map_or_else(|| "[]".into(), |l| list_preview(l, PREVIEW))),
                ],
                Payload::Generations { layers },
            )
        }

        // ---- extraction ----
        "induced_subgraph" => cx.restrict(args.set("nodes").to_vec(), vec![]),
        "k_hop_subgraph" => {
            let hops = args.int("hops").expect("required") as usize;
            let center = args.local("center");
            cx.restrict(
                paths::weak_ball(g, center, hops),
                vec![("hops", hops.to_string()), ("center", args.node("center").0.to_string())],
            )
        }
        "top_k_by_score" => {
            let name = args.column("column");
            let values = memory.column(name).expect("bound columns exist");
            let k = args.int("k").expect("required") as usize;
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            idx.truncate(k);
            idx.sort_unstable();
            cx.restrict(idx, vec![("k", k.to_string()), ("column", name.to_string())])
        }
        "threshold_filter_by_score" => {
            let name = args.column("column");
            let values = memory.column(name).expect("bound columns exist");
            let threshold = args.real("threshold");
            let keep: Vec<usize> = (0..n).filter(|&v| values[v] >= threshold).collect();
            cx.restrict(keep, vec![("column", name.to_string()), ("threshold", fmt_num(threshold))])
        }
        "largest_component" => {
            let blocks = super::algo::weak_components(g);
            let largest = blocks
                .into_iter()
                .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
                .unwrap_or_default();
            cx.restrict(largest, vec![])
        }
        "drop_feature_columns" => Outcome {
            fields: vec![
                ("dropped", memory.base_feature_cols().to_string()),
                ("remaining", memory.score_column_names().len().to_string()),
            ],
            effect: Effect::DropBaseFeatures,
            payload: Payload::None,
        },
        other => unreachable!("registry tool `{other}` has no executor"),
    };
    Ok(out)
}

fn cyclic(cx: &Ctx<'_>) -> ToolError {
    let example = cycles::find_directed_cycle(cx.g)
        .map(|c| list_preview(&originals(cx.memory, &c), PREVIEW))
        .unwrap_or_default();
    cx.fail(format!("the current subgraph contains a cycle {example}; no topological order exists"))
}

/// Percolation states from the first base feature rescaled to `[0, 1]`, else uniform.
fn percolation_states(memory: &MemoryState) -> (Vec<f64>, String) {
    let n = memory.node_count();
    if let Some(x) = memory.column("x0") {
        let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi > lo {
            return (x.iter().map(|v| (v - lo) / (hi - lo)).collect(), "states from x0".into());
        }
    }
    (vec![1.0; n], "uniform states".into())
}
