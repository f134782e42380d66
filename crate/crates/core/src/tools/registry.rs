use super::{ParamKind, ParamSpec};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToolCategory {
    Basic,
    Centrality,
    Connectivity,
    ShortestPath,
    ClusteringCommunity,
    Flow,
    Cycle,
    Topological,
    Extraction,
}

impl ToolCategory {
    pub const ALL: [ToolCategory; 9] = [
        ToolCategory::Basic,
        ToolCategory::Centrality,
        ToolCategory::Connectivity,
        ToolCategory::ShortestPath,
        ToolCategory::ClusteringCommunity,
        ToolCategory::Flow,
        ToolCategory::Cycle,
        ToolCategory::Topological,
        ToolCategory::Extraction,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).expect("listed")
    }

    pub fn name(self) -> &'static str {
        match self {
            ToolCategory::Basic => "basic",
            ToolCategory::Centrality => "centrality",
            ToolCategory::Connectivity => "connectivity",
            ToolCategory::ShortestPath => "shortest-path",
            ToolCategory::ClusteringCommunity => "clustering-community",
            ToolCategory::Flow => "flow",
            ToolCategory::Cycle => "cycle",
            ToolCategory::Topological => "topological",
            ToolCategory::Extraction => "extraction",
        }
    }
}

/// One entry of the tool manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub tool_id: String,
    pub category: ToolCategory,
    pub param_schema: Vec<ParamSpec>,
    pub mutates_memory: bool,
    pub summary_template: String,
    /// The NetworkX function this tool mirrors; empty for extraction tools.
    pub origin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Alternative names accepted by [`super::invoke`]; they do not appear in the registry.
const ALIASES: &[(&str, &str)] = &[("find_cycle", "simple_cycles")];

pub fn resolve_alias(tool_id: &str) -> &str {
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == tool_id)
        .map_or(tool_id, |(_, target)| target)
}

pub fn registry() -> &'static [ToolSpec] {
    static REGISTRY: OnceLock<Vec<ToolSpec>> = OnceLock::new();
    REGISTRY.get_or_init(build)
}

fn p(name: &str, kind: ParamKind) -> ParamSpec {
    ParamSpec {
        name: name.to_string(),
        kind,
        optional: false,
    }
}

fn opt(name: &str, kind: ParamKind) -> ParamSpec {
    ParamSpec {
        optional: true,
        ..p(name, kind)
    }
}

fn build() -> Vec<ToolSpec> {
    use ParamKind::*;
    use ToolCategory::*;
    let node = || vec![p("node", Node)];
    let pair = || vec![p("u", Node), p("v", Node)];
    let st = || vec![p("source", Node), p("target", Node)];
    let flow = || vec![p("source", Node), p("sink", Node)];
    let cut_tpl = "Maximum flow from {source} to {sink} is {value} ({engine}); the minimum cut has {cut} edges and {side} nodes on the source side.";
    let rows: Vec<(&str, ToolCategory, Vec<ParamSpec>, bool, &str, &str)> = vec![
        ("number_of_nodes", Basic, vec![], false, "The current subgraph has {value} nodes.", "G.number_of_nodes()"),
        ("number_of_edges", Basic, vec![], false, "The current subgraph has {value} edges.", "G.number_of_edges()"),
        ("has_node", Basic, node(), false, "Node {node} is {answer} the current subgraph.", "G.has_node(n)"),
        ("has_edge", Basic, pair(), false, "Edge ({u}, {v}) {answer} in the current subgraph.", "G.has_edge(u, v)"),
        ("degree", Basic, vec![], false, "Stored degree as column 'degree' for {n} nodes; top-3: {top}; mean {mean}.", "G.degree()"),
        ("in_degree", Basic, vec![], false, "Stored in-degree as column 'in_degree' for {n} nodes; top-3: {top}; mean {mean}.", "G.in_degree()"),
        ("out_degree", Basic, vec![], false, "Stored out-degree as column 'out_degree' for {n} nodes; top-3: {top}; mean {mean}.", "G.out_degree()"),
        ("get_edge_data", Basic, pair(), false, "Edge ({u}, {v}): {answer}.", "G.get_edge_data(u, v)"),
        ("betweenness_centrality", Centrality, vec![], false, "Betweenness centrality over {n} nodes stored as column 'betweenness'; top-3: {top}.", "nx.betweenness_centrality()"),
        ("closeness_centrality", Centrality, vec![], false, "Closeness centrality over {n} nodes stored as column 'closeness'; top-3: {top}.", "nx.closeness_centrality()"),
        ("degree_centrality", Centrality, vec![], false, "Degree centrality over {n} nodes stored as column 'degree_centrality'; top-3: {top}.", "nx.degree_centrality()"),
        ("eigenvector_centrality", Centrality, vec![], false, "Eigenvector centrality (eigenvalue {lambda}) over {n} nodes stored as column 'eigenvector'; top-3: {top}.", "nx.eigenvector_centrality()"),
        ("harmonic_centrality", Centrality, vec![], false, "Harmonic centrality over {n} nodes stored as column 'harmonic'; top-3: {top}.", "nx.harmonic_centrality()"),
        ("percolation_centrality", Centrality, vec![], false, "Percolation centrality ({states}) over {n} nodes stored as column 'percolation'; top-3: {top}.", "nx.percolation_centrality()"),
        ("second_order_centrality", Centrality, vec![], false, "Second-order centrality over {n} nodes stored as column 'second_order'; lowest-3 (most central): {top}.", "nx.second_order_centrality()"),
        ("subgraph_centrality", Centrality, vec![], false, "Subgraph centrality over {n} nodes stored as column 'subgraph_centrality'; top-3: {top}.", "nx.subgraph_centrality()"),
        ("strongly_connected_components", Connectivity, vec![], false, "{count} strongly connected components; largest has {largest} nodes: {preview}.", "nx.strongly_connected_components()"),
        ("weakly_connected_components", Connectivity, vec![], false, "{count} weakly connected components; largest has {largest} nodes: {preview}.", "nx.weakly_connected_components()"),
        ("articulation_points", Connectivity, vec![], false, "{count} articulation points{note}: {preview}.", "nx.articulation_points()"),
        ("bridges", Connectivity, vec![], false, "{count} bridges{note}: {preview}.", "nx.bridges()"),
        ("k_edge_components", Connectivity, vec![p("k", PositiveInt)], false, "{count} {k}-edge-connected components{note}; largest has {largest} nodes: {preview}.", "nx.k_edge_components()"),
        ("k_node_components", Connectivity, vec![p("k", PositiveInt)], false, "{count} {k}-node-connected components{note}; largest has {largest} nodes: {preview}.", "nx.k_node_components()"),
        ("node_connectivity", Connectivity, vec![], false, "Node connectivity of the current subgraph{note} is {value}.", "nx.node_connectivity()"),
        ("edge_connectivity", Connectivity, vec![], false, "Edge connectivity of the current subgraph{note} is {value}.", "nx.edge_connectivity()"),
        ("all_pairs_shortest_path", ShortestPath, vec![], false, "Computed hop-count shortest paths between {pairs} reachable pairs; diameter {diameter}; example path {example}.", "nx.all_pairs_shortest_path()"),
        ("all_pairs_shortest_path_length", ShortestPath, vec![], false, "Computed hop distances between {pairs} reachable pairs; diameter {diameter}, mean distance {mean}.", "nx.all_pairs_shortest_path_length()"),
        ("dijkstra_path", ShortestPath, st(), false, "Shortest path from {source} to {target}: {path} with total weight {length}.", "nx.dijkstra_path()"),
        ("dijkstra_path_length", ShortestPath, st(), false, "Shortest path length from {source} to {target} is {length}.", "nx.dijkstra_path_length()"),
        ("floyd_warshall", ShortestPath, vec![], false, "Weighted all-pairs distances for {n} nodes: {pairs} reachable pairs, weighted diameter {diameter}.", "nx.floyd_warshall()"),
        ("average_clustering", ClusteringCommunity, vec![], false, "Average clustering coefficient{note} is {value}.", "nx.average_clustering()"),
        ("clustering", ClusteringCommunity, vec![], false, "Clustering coefficients{note} stored as column 'clustering'; top-3: {top}.", "nx.clustering()"),
        ("transitivity", ClusteringCommunity, vec![], false, "Transitivity{note} is {value}.", "nx.transitivity()"),
        ("triangles", ClusteringCommunity, vec![], false, "{total} triangles{note}; per-node counts stored as column 'triangles'; top-3: {top}.", "nx.triangles()"),
        ("label_propagation_communities", ClusteringCommunity, vec![opt("seed", Count)], false, "Label propagation found {count} communities{note} (stored as column 'label_propagation'); sizes {sizes}.", "nx.label_propagation_communities()"),
        ("louvain_communities", ClusteringCommunity, vec![opt("seed", Count)], false, "Louvain found {count} communities{note} with modularity {modularity} (stored as column 'community'); sizes {sizes}.", "nx.louvain_communities()"),
        ("boykov_kolmogorov_min_cut", Flow, flow(), false, cut_tpl, "nx.boykov_kolmogorov_min_cut()"),
        ("dinic_min_cut", Flow, flow(), false, cut_tpl, "nx.dinic_min_cut()"),
        ("edmonds_karp_min_cut", Flow, flow(), false, cut_tpl, "nx.edmonds_karp_min_cut()"),
        ("minimum_cut", Flow, flow(), false, cut_tpl, "nx.minimum_cut()"),
        ("simple_cycles", Cycle, vec![], false, "{answer}; found {count}{more} simple cycles, e.g. {example}.", "nx.simple_cycles()"),
        ("cycle_basis", Cycle, vec![], false, "Cycle basis{note} has {count} cycles; e.g. {example}.", "nx.cycle_basis()"),
        ("topological_sort", Topological, vec![], false, "Topological order of {n} nodes: {order}.", "nx.topological_sort()"),
        ("is_directed_acyclic_graph", Topological, vec![], false, "The current subgraph {answer} a directed acyclic graph.", "nx.is_directed_acyclic_graph()"),
        ("all_topological_sorts", Topological, vec![], false, "{count}{more} topological orders; first: {order}.", "nx.all_topological_sorts()"),
        ("topological_generations", Topological, vec![], false, "{count} topological generations; sizes {sizes}; first: {first}.", "nx.topological_generations()"),
        ("induced_subgraph", Extraction, vec![p("nodes", NodeSet)], true, "Focused memory on the subgraph induced by {preview}: {n} nodes, {m} edges.", ""),
        ("k_hop_subgraph", Extraction, vec![p("center", Node), p("hops", Count)], true, "Focused memory on the {hops}-hop neighborhood of {center}: {n} nodes, {m} edges; members {preview}.", ""),
        ("top_k_by_score", Extraction, vec![p("column", Column), p("k", PositiveInt)], true, "Kept the top {k} nodes by '{column}': {preview}; subgraph now has {n} nodes, {m} edges.", ""),
        ("threshold_filter_by_score", Extraction, vec![p("column", Column), p("threshold", Real)], true, "Kept nodes with '{column}' >= {threshold}: {n} nodes, {m} edges; members {preview}.", ""),
        ("largest_component", Extraction, vec![], true, "Focused memory on the largest weakly connected component: {n} nodes, {m} edges.", ""),
        ("drop_feature_columns", Extraction, vec![], true, "Dropped {dropped} base feature columns; {remaining} score columns remain.", ""),
    ];
    rows.into_iter()
        .map(|(id, category, params, mutates, tpl, origin)| ToolSpec {
            tool_id: id.to_string(),
            category,
            param_schema: params,
            mutates_memory: mutates,
            summary_template: tpl.to_string(),
            origin: origin.to_string(),
            note: note_for(id).map(str::to_string),
        })
        .collect()
}

fn note_for(id: &str) -> Option<&'static str> {
    match id {
        "boykov_kolmogorov_min_cut" => Some("served by the Dinic engine; flow value and cut are identical"),
        "k_node_components" => Some("maximal subgraphs with node connectivity >= k (standard k-component definition), computed on the undirected view"),
        "k_edge_components" => Some("maximal node sets with pairwise local edge connectivity >= k, computed on the undirected view"),
        "percolation_centrality" => Some("percolation states from base feature x0 rescaled to [0, 1]; uniform when absent"),
        "k_hop_subgraph" => Some("hop distance ignores edge direction"),
        _ => None,
    }
}
