use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_graphdistill"));
    c.env("RUST_LOG", "warn");
    for (k, _) in std::env::vars() {
        if k.starts_with("GRAPHDISTILL__") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

const SMALL: &str = r#"
seed = 5

[graph]
count = 3

[graph.generate]
family = "erdos-renyi"
n = 30
p = 0.1
seed = 100
feature_columns = 1

[test_graph.generate]
family = "stochastic-block"
sizes = [10, 10, 10]
p_in = 0.4
p_out = 0.02
seed = 3
feature_columns = 1

[train]
iters = 15
tasks_per_graph = 8
templates = ["max-feature-in-neighborhood"]

[stta]
steps = 4

[stta.fingerprint]
m = 8

[policy]
eval_episodes = 8
save_every = 5

[adapt]
rollouts = 3
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

/// Every output file except wall-clock timings.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timings.tsv" {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn tools_list_covers_registry() {
    let o = run(&["tools", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 51);
    let mut cats: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    cats.dedup();
    assert_eq!(cats.len(), 9, "rows are grouped by category");
    assert_eq!(rows.iter().filter(|r| r[0] == "extraction").count(), 6);

    let o = run(&["tools", "list", "--format", "manifest"]);
    let manifest: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(manifest.as_array().unwrap().len(), 51);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();

    assert_eq!(code(&run(&["no-such-command"])), 2);

    let no_graph = write_config(dir.path(), "seed = 1\n");
    assert_eq!(code(&run(&["run", "--config", no_graph.to_str().unwrap(), "--out", out_s])), 2);

    let typo = write_config(dir.path(), "seed = 1\n[train]\nitres = 3\n");
    let o = run(&["run", "--config", typo.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));

    // A trained run with no checkpoint on disk fails at runtime.
    let cfg = write_config(dir.path(), SMALL);
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));

    std::fs::write(out.join(graphdistill_cli::LOCK_FILE), "1\n").unwrap();
    let o = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", out_s])
        .env("GRAPHDISTILL__POLICY__KIND", "scripted")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
    std::fs::remove_file(out.join(graphdistill_cli::LOCK_FILE)).unwrap();
}

#[test]
fn environment_overrides_and_seed_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "42"])
        .env("GRAPHDISTILL__POLICY__KIND", "random")
        .env("GRAPHDISTILL__TRAIN__TASKS_PER_GRAPH", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let episodes = std::fs::read_to_string(out.join("episode.tsv")).unwrap();
    assert!(episodes.lines().next().unwrap().ends_with("seed=42"));
    assert_eq!(episodes.lines().count(), 2 + 3 * 2);
    assert!(!out.join(graphdistill_cli::LOCK_FILE).exists(), "lock released");
}

#[test]
fn pipeline_is_reproducible_and_adaptation_freezes_base() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut snaps = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let out_s = out.to_str().unwrap();
        for cmd in ["train", "run", "adapt", "fingerprint"] {
            let o = run(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out_s]);
            assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
            if cmd == "adapt" {
                assert!(String::from_utf8_lossy(&o.stdout).contains("base policy unchanged"));
            }
        }
        assert!(out.join("checkpoints/iter_00015.json").exists());
        assert!(out.join("trajectory.jsonl").exists());
        snaps.push(snapshot(&out));
    }
    assert_eq!(snaps[0].keys().collect::<Vec<_>>(), snaps[1].keys().collect::<Vec<_>>());
    for (k, v) in &snaps[0] {
        assert!(v == &snaps[1][k], "{k} differs between identical runs");
    }
    let summary = String::from_utf8(snaps[0]["adapt_summary.tsv"].clone()).unwrap();
    let row: Vec<&str> = summary.lines().nth(2).unwrap().split('\t').collect();
    assert_eq!(row[4], row[5], "checkpoint bytes changed");
}
