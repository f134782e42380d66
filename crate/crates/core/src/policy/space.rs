//! Finite action space over (tool, parameter-slot) pairs and the state encoder.

use crate::env::{Action, EnvState, TaskTemplate};
use crate::tools::{registry, ParamKind, ParamValue, Params, ToolCategory};

/// Where a concrete parameter value comes from at decision time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// i-th node bound by the query.
    Bound(usize),
    /// Every query-bound node still in memory.
    BoundSet,
    /// Argmax of the most recently appended score column.
    TopScored,
    Const(u64),
    Column(ColumnSlot),
    /// Mean of the column chosen by the paired column slot.
    ColumnMean(ColumnSlot),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSlot {
    /// The query's designated score column.
    Designated,
    LastAppended,
    /// Base feature column `x0`.
    Feature0,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionEntry {
    Terminate,
    Tool { tool_id: String, slots: Vec<(String, Slot)>, category: ToolCategory },
}

const TOP_K: [u64; 4] = [1, 5, 10, 20];
const HOPS: [u64; 3] = [1, 2, 3];
const CONNECTIVITY_K: [u64; 3] = [1, 2, 3];
const COLUMNS: [ColumnSlot; 3] = [ColumnSlot::Designated, ColumnSlot::LastAppended, ColumnSlot::Feature0];
/// Tools that may be asked about nodes outside the current subgraph.
const PROBES: [&str; 3] = ["has_node", "has_edge", "get_edge_data"];

/// State encoding width: bias, 5 scalars, 5 step buckets, 10 last-category slots, 12 templates.
pub const FEATURE_DIM: usize = 1 + 5 + 5 + (ToolCategory::ALL.len() + 1) + TaskTemplate::ALL.len();

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    entries: Vec<ActionEntry>,
}

impl Default for ActionSpace {
    fn default() -> Self {
        Self::standard()
    }
}

impl ActionSpace {
    /// TERMINATE at index 0, then every registry tool expanded over its slot choices.
    pub fn standard() -> Self {
        let mut entries = vec![ActionEntry::Terminate];
        for spec in registry() {
            let required: Vec<_> = spec.param_schema.iter().filter(|p| !p.optional).collect();
            let node_params: Vec<&str> = required.iter().filter(|p| p.kind == ParamKind::Node).map(|p| p.name.as_str()).collect();
            // Per-parameter alternatives; node pairs bind (Bound0, Bound1) jointly.
            let mut choices: Vec<Vec<Vec<(String, Slot)>>> = Vec::new();
            match node_params.len() {
                0 => {}
                1 => {
                    let name = node_params[0].to_string();
                    choices.push(
                        [Slot::Bound(0), Slot::Bound(1), Slot::TopScored]
                            .into_iter()
                            .map(|s| vec![(name.clone(), s)])
                            .collect(),
                    );
                }
                _ => choices.push(vec![node_params
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.to_string(), Slot::Bound(i)))
                    .collect()]),
            }
            let column_param = required.iter().find(|p| p.kind == ParamKind::Column).map(|p| p.name.clone());
            let real_param = required.iter().find(|p| p.kind == ParamKind::Real).map(|p| p.name.clone());
            if let Some(col) = &column_param {
                choices.push(
                    COLUMNS
                        .iter()
                        .map(|&c| {
                            let mut v = vec![(col.clone(), Slot::Column(c))];
                            if let Some(r) = &real_param {
                                v.push((r.clone(), Slot::ColumnMean(c)));
                            }
                            v
                        })
                        .collect(),
                );
            }
            for p in &required {
                let consts: &[u64] = match (p.kind, p.name.as_str()) {
                    (ParamKind::PositiveInt, _) if spec.tool_id == "top_k_by_score" => &TOP_K,
                    (ParamKind::PositiveInt, _) => &CONNECTIVITY_K,
                    (ParamKind::Count, _) => &HOPS,
                    (ParamKind::NodeSet, _) => {
                        choices.push(vec![vec![(p.name.clone(), Slot::BoundSet)]]);
                        continue;
                    }
                    _ => continue,
                };
                choices.push(consts.iter().map(|&k| vec![(p.name.clone(), Slot::Const(k))]).collect());
            }
            let mut combos: Vec<Vec<(String, Slot)>> = vec![Vec::new()];
            for alternatives in &choices {
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        alternatives.iter().map(move |a| {
                            let mut next = c.clone();
                            next.extend(a.iter().cloned());
                            next
                        })
                    })
                    .collect();
            }
            for slots in combos {
                entries.push(ActionEntry::Tool {
                    tool_id: spec.tool_id.clone(),
                    slots,
                    category: spec.category,
                });
            }
        }
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ActionEntry] {
        &self.entries
    }

    /// Index of the entry for `tool_id` whose slots equal `slots`.
    pub fn find(&self, tool_id: &str, slots: &[(&str, Slot)]) -> Option<usize> {
        self.entries.iter().position(|e| match e {
            ActionEntry::Tool { tool_id: t, slots: s, .. } => {
                t == tool_id && s.len() == slots.len() && s.iter().zip(slots).all(|((a, x), (b, y))| a == b && x == y)
            }
            ActionEntry::Terminate => false,
        })
    }

    pub fn label(&self, i: usize) -> String {
        match &self.entries[i] {
            ActionEntry::Terminate => "TERMINATE".into(),
            ActionEntry::Tool { tool_id, slots, .. } => {
                let args: Vec<String> = slots.iter().map(|(k, s)| format!("{k}={s:?}")).collect();
                format!("{tool_id}({})", args.join(", "))
            }
        }
    }

    /// Concrete action for entry `i` in state `s`, or `None` when a slot cannot be filled.
    pub fn resolve(&self, i: usize, s: &EnvState) -> Option<Action> {
        let (tool_id, slots) = match &self.entries[i] {
            ActionEntry::Terminate => return Some(Action::Terminate),
            ActionEntry::Tool { tool_id, slots, .. } => (tool_id, slots),
        };
        let probe = PROBES.contains(&tool_id.as_str());
        let mut params = Params::new();
        for (name, slot) in slots {
            let value = match *slot {
                Slot::Bound(k) => {
                    let v = *s.query.bound_nodes().get(k)?;
                    if !probe && s.memory.local_of(v).is_none() {
                        return None;
                    }
                    ParamValue::Int(v as u64)
                }
                Slot::BoundSet => {
                    let nodes: Vec<usize> = s.query.bound_nodes().into_iter().filter(|&v| s.memory.local_of(v).is_some()).collect();
                    if nodes.is_empty() {
                        return None;
                    }
                    ParamValue::NodeSet(nodes)
                }
                Slot::TopScored => ParamValue::Int(top_scored(s)? as u64),
                Slot::Const(k) => ParamValue::Int(k),
                Slot::Column(c) => ParamValue::Text(column_name(c, s)?),
                Slot::ColumnMean(c) => {
                    let col = s.memory.column(&column_name(c, s)?)?;
                    if col.is_empty() {
                        return None;
                    }
                    ParamValue::Real(col.iter().sum::<f64>() / col.len() as f64)
                }
            };
            params.insert(name.clone(), value);
        }
        Some(Action::Tool { tool_id: tool_id.clone(), params })
    }

    /// Valid entries in `s`. TERMINATE is always valid and is the only valid
    /// entry on the last permitted step. Extraction entries that cannot shrink
    /// the memory (single node left, `k` not below the node count) are masked.
    pub fn mask(&self, s: &EnvState, n_max: usize) -> Vec<bool> {
        let last = s.step_index + 1 >= n_max;
        let n = s.memory.node_count();
        (0..self.len())
            .map(|i| match &self.entries[i] {
                ActionEntry::Terminate => true,
                _ if last => false,
                ActionEntry::Tool { tool_id, slots, category } => {
                    if *category == ToolCategory::Extraction && tool_id != "drop_feature_columns" && n <= 1 {
                        return false;
                    }
                    if tool_id == "top_k_by_score"
                        && slots.iter().any(|(_, s)| matches!(s, Slot::Const(k) if *k as usize >= n))
                    {
                        return false;
                    }
                    self.resolve(i, s).is_some()
                }
            })
            .collect()
    }
}

fn column_name(c: ColumnSlot, s: &EnvState) -> Option<String> {
    let name = match c {
        ColumnSlot::Designated => s.query.designated_column.clone()?,
        ColumnSlot::LastAppended => s.memory.last_score_column()?.to_string(),
        ColumnSlot::Feature0 => "x0".to_string(),
    };
    s.memory.has_column(&name).then_some(name)
}

fn top_scored(s: &EnvState) -> Option<usize> {
    let col = s.memory.column(s.memory.last_score_column()?)?;
    let best = (0..col.len()).max_by(|&a, &b| col[a].total_cmp(&col[b]).then(b.cmp(&a)))?;
    Some(s.memory.original_of(best))
}

/// Frozen state encoder: bias; node, edge, and GDL ratios to the initial
/// state; feature width; relevance; step bucket; last tool category; query
/// template.
pub fn state_features(s: &EnvState) -> Vec<f64> {
    let mut x = Vec::with_capacity(FEATURE_DIM);
    let n0 = s.graph.node_count().max(1) as f64;
    let m0 = s.graph.edge_count().max(1) as f64;
    x.push(1.0);
    x.push(s.memory.node_count() as f64 / n0);
    x.push(s.memory.edge_count() as f64 / m0);
    x.push((s.memory.feature_dims() as f64 / 8.0).min(1.0));
    x.push(if s.gdl0 > 0.0 { s.gdl / s.gdl0 } else { 0.0 });
    x.push(s.rel);
    let mut step = [0.0; 5];
    step[s.step_index.min(4)] = 1.0;
    x.extend_from_slice(&step);
    let mut cat = vec![0.0; ToolCategory::ALL.len() + 1];
    cat[s.last_category.map_or(0, |c| c.index() + 1)] = 1.0;
    x.extend(cat);
    let mut tpl = vec![0.0; TaskTemplate::ALL.len()];
    tpl[s.query.template.index()] = 1.0;
    x.extend(tpl);
    debug_assert_eq!(x.len(), FEATURE_DIM);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminate_first_and_stable() {
        let a = ActionSpace::standard();
        let b = ActionSpace::standard();
        assert_eq!(a, b);
        assert_eq!(a.entries()[0], ActionEntry::Terminate);
        assert!(a.find("k_hop_subgraph", &[("center", Slot::Bound(0)), ("hops", Slot::Const(1))]).is_some());
        assert!(a
            .find("top_k_by_score", &[("column", Slot::Column(ColumnSlot::Feature0)), ("k", Slot::Const(1))])
            .is_some());
        // Every registry tool is reachable.
        for spec in registry() {
            assert!(a.entries().iter().any(|e| matches!(e, ActionEntry::Tool { tool_id, .. } if *tool_id == spec.tool_id)));
        }
    }
}
