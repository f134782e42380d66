//! The graph analysis tool library.
//!
//! Every tool maps `(memory, params)` to `(description, memory')`. The
//! description is a short summary (at most [`DESCRIPTION_BUDGET`] characters);
//! full-fidelity results live in the new memory (score columns, restricted
//! subgraph) and in the structured [`Payload`].
//!
//! Node parameters and every node id reported in payloads and descriptions are
//! ids of the original graph, not of the current subgraph.

pub mod algo;
mod exec;
mod registry;

pub use registry::{registry, resolve_alias, ToolCategory, ToolSpec};

use crate::distill::MemoryState;
use crate::error::ToolError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hard cap on description length, in characters.
pub const DESCRIPTION_BUDGET: usize = 512;

/// All-pairs tools refuse subgraphs larger than this.
pub const ALL_PAIRS_NODE_LIMIT: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    Node,
    NodeSet,
    PositiveInt,
    /// Nonnegative integer.
    Count,
    Real,
    /// Name of a score column or base feature column (`x<i>`) in the current memory.
    Column,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(u64),
    Real(f64),
    NodeSet(Vec<usize>),
    Text(String),
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowEngine {
    EdmondsKarp,
    Dinic,
    /// Served by the Dinic engine; the value contract is identical.
    BoykovKolmogorov,
}

/// Structured tool output kept out of the description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    None,
    Count { value: usize },
    Scalar { value: f64 },
    Flag { value: bool },
    Scores { column: String },
    Nodes { nodes: Vec<usize> },
    Edges { edges: Vec<(usize, usize, f64)> },
    EdgeData { weight: Option<f64> },
    Path { nodes: Vec<usize>, length: f64 },
    Partition { blocks: Vec<Vec<usize>> },
    Cut {
        value: f64,
        source_side: Vec<usize>,
        cut_edges: usize,
        engine: FlowEngine,
    },
    Cycles { cycles: Vec<Vec<usize>>, truncated: bool },
    Orders { orders: Vec<Vec<usize>>, truncated: bool },
    Generations { layers: Vec<Vec<usize>> },
    /// Row-major distances between `nodes`; unreachable pairs are `f64::INFINITY`.
    Distances { nodes: Vec<usize>, values: Vec<f64> },
    Subgraph { nodes: usize, edges: usize },
}

#[derive(Debug, Clone)]
pub struct ToolResult {
    pub description: String,
    pub memory_after: MemoryState,
    pub raw_payload: Payload,
}

/// Runs `tool_id` against `memory`. On any error the input memory is untouched.
pub fn invoke(tool_id: &str, memory: &MemoryState, params: &Params) -> Result<ToolResult, ToolError> {
    let id = resolve_alias(tool_id);
    let spec = registry()
        .iter()
        .find(|s| s.tool_id == id)
        .ok_or_else(|| ToolError::ToolNotFound(tool_id.to_string()))?;
    let args = exec::Args::bind(spec, memory, params)?;
    let outcome = exec::run(spec, memory, &args)?;
    let description = render(&spec.summary_template, &outcome.fields);
    let memory_after = match outcome.effect {
        exec::Effect::None => memory.clone(),
        exec::Effect::Column { name, values } => memory.with_column(&name, values),
        exec::Effect::Restrict(local) => memory.restricted(&local),
        exec::Effect::DropBaseFeatures => memory.without_base_features(),
    }
    .with_history_entry(description.clone());
    Ok(ToolResult {
        description,
        memory_after,
        raw_payload: outcome.payload,
    })
}

/// Substitutes `{key}` placeholders and enforces the description budget.
fn render(template: &str, fields: &[(&'static str, String)]) -> String {
    let mut out = template.to_string();
    for (k, v) in fields {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    truncate_chars(&out, DESCRIPTION_BUDGET)
}

pub(crate) fn truncate_chars(s: &str, max: usize) -> String {
    if s.chars().count() <= max {
        return s.to_string();
    }
    let mut t: String = s.chars().take(max.saturating_sub(3)).collect();
    t.push_str("...");
    t
}

/// Renders at most `limit` items, followed by the total when truncated.
pub(crate) fn list_preview<T: std::fmt::Display>(items: &[T], limit: usize) -> String {
    let shown: Vec<String> = items.iter().take(limit).map(ToString::to_string).collect();
    if items.len() > limit {
        format!("[{}, ... ({} total)]", shown.join(", "), items.len())
    } else {
        format!("[{}]", shown.join(", "))
    }
}
