//! Line-delimited JSON trajectory log with a running SHA-256 digest.

use super::{StepRecord, Trajectory};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

/// Run metadata stamped on every record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_hash: String,
}

/// One line of the log: a step record plus its run and episode coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seed: u64,
    pub config_hash: String,
    pub episode: usize,
    pub step: usize,
    #[serde(flatten)]
    pub record: StepRecord,
}

struct Inner {
    sink: Option<BufWriter<File>>,
    buffer: Vec<u8>,
    keep_buffer: bool,
    hasher: Sha256,
    lines: usize,
}

/// Accepts concurrent appends; each trajectory is written as one contiguous block.
pub struct TrajectoryLog {
    meta: RunMeta,
    inner: Mutex<Inner>,
}

impl TrajectoryLog {
    /// Log kept in memory (see [`TrajectoryLog::contents`]).
    pub fn in_memory(meta: RunMeta) -> Self {
        Self::with_sink(meta, None, true)
    }

    pub fn create(path: &Path, meta: RunMeta) -> std::io::Result<Self> {
        let f = File::create(path)?;
        Ok(Self::with_sink(meta, Some(BufWriter::new(f)), false))
    }

    /// Digest-only log: nothing is retained.
    pub fn digest_only(meta: RunMeta) -> Self {
        Self::with_sink(meta, None, false)
    }

    fn with_sink(meta: RunMeta, sink: Option<BufWriter<File>>, keep_buffer: bool) -> Self {
        Self {
            meta,
            inner: Mutex::new(Inner {
                sink,
                buffer: Vec::new(),
                keep_buffer,
                hasher: Sha256::new(),
                lines: 0,
            }),
        }
    }

    pub fn meta(&self) -> &RunMeta {
        &self.meta
    }

    pub fn append(&self, episode: usize, t: &Trajectory) -> std::io::Result<()> {
        let mut block = Vec::new();
        for (i, r) in t.records.iter().enumerate() {
            let rec = LogRecord {
                seed: self.meta.seed,
                config_hash: self.meta.config_hash.clone(),
                episode,
                step: i,
                record: r.clone(),
            };
            serde_json::to_writer(&mut block, &rec)?;
            block.push(b'\n');
        }
        let mut inner = self.inner.lock().expect("log lock poisoned");
        inner.hasher.update(&block);
        inner.lines += t.records.len();
        if let Some(w) = inner.sink.as_mut() {
            w.write_all(&block)?;
        }
        if inner.keep_buffer {
            inner.buffer.extend_from_slice(&block);
        }
        Ok(())
    }

    pub fn flush(&self) -> std::io::Result<()> {
        let mut inner = self.inner.lock().expect("log lock poisoned");
        match inner.sink.as_mut() {
            Some(w) => w.flush(),
            None => Ok(()),
        }
    }

    /// Hex SHA-256 of every byte appended so far.
    pub fn digest(&self) -> String {
        let inner = self.inner.lock().expect("log lock poisoned");
        hex::encode(inner.hasher.clone().finalize())
    }

    pub fn line_count(&self) -> usize {
        self.inner.lock().expect("log lock poisoned").lines
    }

    /// Bytes of an in-memory log (empty for file-backed logs).
    pub fn contents(&self) -> Vec<u8> {
        self.inner.lock().expect("log lock poisoned").buffer.clone()
    }
}

/// Parses a log, skipping (and counting) lines that fail to parse.
pub fn parse_log(text: &str) -> (Vec<LogRecord>, usize) {
    let mut ok = Vec::new();
    let mut bad = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str::<LogRecord>(line) {
            Ok(r) => ok.push(r),
            Err(_) => bad += 1,
        }
    }
    (ok, bad)
}
