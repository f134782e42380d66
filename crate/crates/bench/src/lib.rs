//! Criterion benchmarks for the toolkit, fingerprint, and learner; see `benches/core.rs`.
