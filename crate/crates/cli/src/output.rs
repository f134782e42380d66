//! Output directory handling: the lock file and tab-separated tables stamped
//! with the config hash and seed.

use crate::CliError;
use serde::Serialize;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const LOCK_FILE: &str = ".graphdistill.lock";

/// Shortest round-trip decimal form; never exponent notation.
pub fn format_num(v: f64) -> String {
    format!("{v}")
}

struct Lock(PathBuf);

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

/// An exclusively held output directory.
pub struct Output {
    dir: PathBuf,
    hash: String,
    seed: u64,
    _lock: Lock,
}

impl Output {
    pub fn open(dir: &Path, hash: &str, seed: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let lock_path = dir.join(LOCK_FILE);
        let mut f = match OpenOptions::new().write(true).create_new(true).open(&lock_path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(CliError::LockHeld(dir.to_path_buf())),
            Err(e) => return Err(e.into()),
        };
        writeln!(f, "{}", std::process::id())?;
        Ok(Self { dir: dir.to_path_buf(), hash: hash.to_string(), seed, _lock: Lock(lock_path) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `name` as a TSV table with a `# config_hash=… seed=…` first line.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut f = std::io::BufWriter::new(File::create(&path)?);
        writeln!(f, "# config_hash={} seed={}", self.hash, self.seed)?;
        writeln!(f, "{}", header.join("\t"))?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            writeln!(f, "{}", r.join("\t"))?;
        }
        f.flush()?;
        Ok(path)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }

    /// Wall-clock measurements go to `timings.tsv`, the one output that is
    /// not expected to reproduce byte-for-byte.
    pub fn timings(&self, rows: &[(String, f64)]) -> Result<PathBuf, CliError> {
        let rows: Vec<Vec<String>> = rows.iter().map(|(k, s)| vec![k.clone(), format!("{s:.3}")]).collect();
        self.table("timings.tsv", &["stage", "seconds"], &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_open_is_rejected_until_drop() {
        let dir = tempfile::tempdir().unwrap();
        let a = Output::open(dir.path(), "h", 1).unwrap();
        assert!(matches!(Output::open(dir.path(), "h", 1), Err(CliError::LockHeld(_))));
        drop(a);
        let b = Output::open(dir.path(), "h", 1).unwrap();
        b.table("t.tsv", &["a", "b"], &[vec!["1".into(), format_num(0.5)]]).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.tsv")).unwrap();
        assert_eq!(text, "# config_hash=h seed=1\na\tb\n1\t0.5\n");
    }
}
