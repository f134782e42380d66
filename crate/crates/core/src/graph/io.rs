//! Edge-list text format.
//!
//! Each data line is `src dst [weight]`; ids are arbitrary whitespace-free
//! strings, compacted to dense ids in order of first appearance. Lines starting
//! with `#` are comments, except `# node <label>` directives which register a
//! node (so isolated nodes and id order survive a save/load round trip).

use super::Graph;
use crate::error::GraphError;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub fn load_edge_list(path: &Path, directed: bool, weighted: bool) -> Result<Graph, GraphError> {
    let file = std::fs::File::open(path)?;
    parse_edge_list(BufReader::new(file), directed, weighted)
}

pub fn parse_edge_list(
    reader: impl BufRead,
    directed: bool,
    weighted: bool,
) -> Result<Graph, GraphError> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut intern = |label: &str, ids: &mut HashMap<String, usize>| -> usize {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_string());
        ids.insert(label.to_string(), id);
        id
    };
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(label) = rest.trim_start().strip_prefix("node ") {
                intern(label.trim(), &mut ids);
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected `src dst [weight]`, got {} fields", fields.len()),
            });
        }
        let weight = match fields.get(2) {
            Some(raw) => {
                let w: f64 = raw.parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    message: format!("weight `{raw}` is not a number"),
                })?;
                if !w.is_finite() {
                    return Err(GraphError::Parse {
                        line: line_no,
                        message: format!("weight `{raw}` is not finite"),
                    });
                }
                if w < 0.0 {
                    return Err(GraphError::Validation(format!(
                        "line {line_no}: negative weight {w}"
                    )));
                }
                if weighted {
                    w
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let s = intern(fields[0], &mut ids);
        let d = intern(fields[1], &mut ids);
        if s == d {
            return Err(GraphError::Validation(format!(
                "line {line_no}: self-loop on `{}`",
                fields[0]
            )));
        }
        edges.push((s, d, weight));
    }
    let n = labels.len();
    Graph::new(n, directed, edges)?.with_labels(labels)
}

/// Writes the canonical form: a header, one `# node` directive per node in id
/// order, then edges in lexicographic `(src, dst)` order with 17 significant
/// digit weights.
pub fn write_edge_list(graph: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "# edge list: directed={} nodes={} edges={}",
        graph.is_directed(),
        graph.node_count(),
        graph.edge_count()
    )?;
    for v in 0..graph.node_count() {
        writeln!(out, "# node {}", graph.label(v))?;
    }
    for e in graph.edges() {
        writeln!(
            out,
            "{} {} {:.16e}",
            graph.label(e.src),
            graph.label(e.dst),
            e.weight
        )?;
    }
    Ok(())
}

pub fn save_edge_list(graph: &Graph, path: &Path) -> Result<(), GraphError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_edge_list(graph, &mut w)?;
    w.flush()?;
    Ok(())
}
