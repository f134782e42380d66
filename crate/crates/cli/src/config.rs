//! Run configuration: one TOML file, `GRAPHDISTILL__SECTION__KEY` overrides,
//! and a content hash stamped on every artifact.

use crate::CliError;
use graphdistill::env::{generate_tasks, Query};
use graphdistill::graph::{generate_synthetic, load_edge_list, GraphGenSpec};
use graphdistill::policy::TrainConfig;
use graphdistill::stta::SttaConfig;
use graphdistill::{Graph, ScorerConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const ENV_PREFIX: &str = "GRAPHDISTILL__";

/// Where graphs come from: an edge-list file or a generator spec, never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSource {
    pub path: Option<PathBuf>,
    pub directed: bool,
    pub weighted: bool,
    pub generate: Option<GraphGenSpec>,
    /// Generated graphs to draw, with seeds `seed, seed + 1, …`. Files load once.
    pub count: usize,
}

impl Default for GraphSource {
    fn default() -> Self {
        Self { path: None, directed: false, weighted: false, generate: None, count: 1 }
    }
}

impl GraphSource {
    fn validate(&self, section: &str) -> Result<(), CliError> {
        match (&self.path, &self.generate) {
            (Some(_), Some(_)) => Err(CliError::Config(format!("[{section}] sets both `path` and `generate`"))),
            (None, None) => Ok(()),
            (None, Some(spec)) => {
                spec.validate().map_err(|e| CliError::Config(format!("[{section}.generate] {e}")))?;
                if self.count == 0 {
                    return Err(CliError::Config(format!("[{section}] count must be >= 1")));
                }
                Ok(())
            }
            (Some(_), None) => Ok(()),
        }
    }

    pub fn is_set(&self) -> bool {
        self.path.is_some() || self.generate.is_some()
    }

    pub fn load(&self, section: &str) -> Result<Vec<Arc<Graph>>, CliError> {
        if let Some(path) = &self.path {
            let g = load_edge_list(path, self.directed, self.weighted).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            return Ok(vec![Arc::new(g)]);
        }
        let Some(spec) = self.generate.as_ref() else {
            return Err(CliError::Config(format!("[{section}] needs `path` or a `generate` table")));
        };
        (0..self.count as u64)
            .map(|i| {
                let mut s = spec.clone();
                s.seed = spec.seed.wrapping_add(i);
                generate_synthetic(&s).map(Arc::new).map_err(|e| CliError::Runtime(e.to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Uniform over valid actions.
    Random,
    /// The generator's reference chain for the query.
    Scripted,
    /// Parameters from a checkpoint.
    Trained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub kind: PolicyKind,
    /// Policy checkpoint; defaults to `<out>/policy.json`.
    pub checkpoint: Option<PathBuf>,
    /// Intermediate checkpoint interval in iterations (0: final only).
    pub save_every: usize,
    /// Episodes for the before/after evaluation of `train`.
    pub eval_episodes: usize,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self { kind: PolicyKind::Trained, checkpoint: None, save_every: 0, eval_episodes: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptSection {
    /// Seed of the held-out auxiliary queries used to measure chain length.
    pub held_out_seed: u64,
    pub rollouts: usize,
}

impl Default for AdaptSection {
    fn default() -> Self {
        Self { held_out_seed: 999, rollouts: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub sizes: Vec<usize>,
    /// Attachment count of the preferential-attachment graphs.
    pub attach: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self { sizes: vec![1_000, 10_000, 100_000, 200_000], attach: 3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Output directory; relative paths resolve against the config file.
    pub out: Option<PathBuf>,
    pub graph: GraphSource,
    /// Graph for `adapt`; the first training graph when absent.
    pub test_graph: Option<GraphSource>,
    pub train: TrainConfig,
    pub stta: SttaConfig,
    pub scorer: ScorerConfig,
    pub policy: PolicySection,
    pub adapt: AdaptSection,
    pub bench: BenchSection,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.graph.validate("graph")?;
        if let Some(t) = &self.test_graph {
            t.validate("test_graph")?;
        }
        self.train.validate().map_err(|e| CliError::Config(format!("[train] {e}")))?;
        self.stta.validate().map_err(|e| CliError::Config(format!("[stta] {e}")))?;
        if self.stta.prompt_dim() != self.train.prompt_dim {
            return Err(CliError::Config(format!(
                "[stta] prompt_len * prompt_width = {} but [train] prompt_dim = {}",
                self.stta.prompt_dim(),
                self.train.prompt_dim
            )));
        }
        if self.adapt.rollouts == 0 {
            return Err(CliError::Config("[adapt] rollouts must be >= 1".into()));
        }
        if self.bench.sizes.is_empty() || self.bench.attach == 0 {
            return Err(CliError::Config("[bench] needs sizes and attach >= 1".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, minus the output directory, so
    /// the same experiment hashes the same wherever it writes.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }

    /// Tasks on `g` for `run`: the configured templates, `tasks_per_graph` of them.
    pub fn tasks(&self, g: &Graph) -> Result<Vec<Query>, CliError> {
        generate_tasks(g, &self.train.templates, self.train.tasks_per_graph, self.seed).map_err(|e| CliError::Runtime(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p.as_mut() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.out);
        fix(&mut self.graph.path);
        if let Some(t) = self.test_graph.as_mut() {
            fix(&mut t.path);
        }
        fix(&mut self.policy.checkpoint);
    }
}

/// Parses an override value as a TOML scalar, falling back to a bare string.
fn scalar(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies `(PREFIX + "A__B__C", value)` pairs as `a.b.c = value`.
pub fn apply_overrides(doc: &mut toml::Table, vars: impl IntoIterator<Item = (String, String)>) -> Result<Vec<String>, CliError> {
    let mut applied = Vec::new();
    let mut vars: Vec<(String, String)> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(|s| s.to_ascii_lowercase()).collect();
        if path.iter().any(|s| s.is_empty()) {
            return Err(CliError::Config(format!("malformed override variable {key}")));
        }
        let (leaf, parents) = path.split_last().expect("non-empty");
        let mut table = &mut *doc;
        for p in parents {
            let entry = table.entry(p.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| CliError::Config(format!("{key}: `{p}` is not a section")))?;
        }
        if matches!(table.get(leaf), Some(toml::Value::Table(_))) {
            return Err(CliError::Config(format!("{key}: only scalar leaves can be overridden")));
        }
        table.insert(leaf.clone(), scalar(&raw));
        applied.push(path.join("."));
    }
    Ok(applied)
}

/// Reads the config file (or defaults), applies environment overrides, and validates.
pub fn load(path: Option<&Path>, vars: impl IntoIterator<Item = (String, String)>) -> Result<RunConfig, CliError> {
    let (mut doc, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let doc: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            (doc, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (toml::Table::new(), PathBuf::from(".")),
    };
    for key in apply_overrides(&mut doc, vars)? {
        log::info!("config override: {key}");
    }
    let mut cfg: RunConfig = toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.resolve_paths(&base);
    cfg.validate()?;
    Ok(cfg)
}
