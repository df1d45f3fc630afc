use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const NINE_SWITCH: &str = "[[0.05, 0.17], [0.13, 0.62], [0.23, 0.91], [0.36, 0.42], [0.42, 0.53], \
                           [0.51, 0.58], [0.63, 0.73], [0.78, 0.26], [0.91, 0.97]]";

fn s2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s2"))
        .args(args)
        .env("S2_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn build_nine_switch(dir: &Path) -> PathBuf {
    let coords = dir.join("coords.json");
    fs::write(&coords, NINE_SWITCH).unwrap();
    let topo = dir.join("topo.json");
    let o = s2(&[
        "build",
        "--n", "9",
        "--servers", "18",
        "--ports", "6",
        "--seed", "7",
        "--coords", coords.to_str().unwrap(),
        "--output", topo.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    topo
}

fn edges_with_role(topo: &Value, role: &str) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = topo["edges"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["roles"].as_array().unwrap().iter().any(|r| r == role))
        .map(|e| {
            let (a, b) = (e["a"].as_u64().unwrap() as usize, e["b"].as_u64().unwrap() as usize);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort();
    out
}

#[test]
fn nine_switch_build_has_ring_adjacency() {
    let dir = tempfile::tempdir().unwrap();
    let topo: Value = serde_json::from_str(&fs::read_to_string(build_nine_switch(dir.path())).unwrap()).unwrap();
    let coords: Vec<Vec<f64>> = serde_json::from_str(NINE_SWITCH).unwrap();
    assert_eq!(topo["L"], 2);
    for space in 0..2 {
        let mut order: Vec<usize> = (0..9).collect();
        order.sort_by(|&a, &b| coords[a][space].total_cmp(&coords[b][space]));
        let mut expected: Vec<_> = (0..9)
            .map(|i| {
                let (a, b) = (order[i], order[(i + 1) % 9]);
                (a.min(b), a.max(b))
            })
            .collect();
        expected.sort();
        assert_eq!(edges_with_role(&topo, &format!("ring:{}", space + 1)), expected);
    }
}

#[test]
fn validate_accepts_built_topology() {
    let dir = tempfile::tempdir().unwrap();
    let topo = build_nine_switch(dir.path());
    let o = s2(&["validate", topo.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "OK");
}

fn tampered(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut topo: Value = serde_json::from_str(&fs::read_to_string(build_nine_switch(dir)).unwrap()).unwrap();
    edit(&mut topo);
    let path = dir.join("bad.json");
    fs::write(&path, serde_json::to_string(&topo).unwrap()).unwrap();
    path
}

#[test]
fn validate_rejects_duplicate_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tampered(dir.path(), |t| {
        let c = t["switches"][0]["coords"][0].clone();
        t["switches"][1]["coords"][0] = c;
    });
    let o = s2(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("duplicate coordinate"));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn validate_rejects_excess_degree() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tampered(dir.path(), |t| {
        let edges = t["edges"].as_array_mut().unwrap();
        let linked: Vec<u64> = edges
            .iter()
            .filter(|e| e["a"] == 0 || e["b"] == 0)
            .map(|e| if e["a"] == 0 { e["b"].as_u64().unwrap() } else { e["a"].as_u64().unwrap() })
            .collect();
        for x in (1..9).filter(|x| !linked.contains(x)) {
            edges.push(serde_json::json!({ "a": 0, "b": x, "roles": ["random"] }));
        }
        t["w"] = serde_json::json!(100);
    });
    let o = s2(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("degree"));
}

#[test]
fn exit_codes() {
    let o = s2(&["build", "--n", "9", "--ports", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[infeasible]: "));

    let o = s2(&["greedy-paths", "--topology", "/nonexistent/topo.json"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[io]: "));

    let o = s2(&["greedy-paths", "--n", "9"]);
    assert_eq!(o.status.code(), Some(2));

    let o = s2(&["failures", "--n", "9", "--ports", "6", "--fractions", "1.5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = s2(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn run_reads_toml_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "experiment = \"greedy_paths\"\n[topology]\nn = 30\nports = 8\nseeds = \"1..2\"\n[params]\nk_hops = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = s2(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["params"]["k_hops"], 1);
    assert!(summary["library_version"].is_string());
    assert_eq!(summary["csv_schema_version"], 1);
    assert!(summary["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(summary["results"]["success_rate"], 1.0);
    let csv = fs::read_to_string(out.join("greedy_paths.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

/// Small configuration per experiment; each writes CSV tables into `out`.
fn experiment_args(name: &str) -> Vec<&'static str> {
    let mut args = match name {
        "shortest_paths" => vec!["shortest-paths", "--regular-baseline", "--metric", "server"],
        "greedy_paths" => vec!["greedy-paths"],
        "link_load" => vec!["link-load", "--k-hops", "1"],
        "forwarding_state" => vec!["forwarding-state"],
        "bisection" => vec!["bisection", "--partitions", "5"],
        "throughput" => vec!["throughput", "--subflows", "1,4", "--first-hop", "load-aware"],
        "failures" => vec!["failures", "--fractions", "0,0.2", "--trials", "2"],
        "key_routing" => vec!["key-routing", "--keys", "5"],
        _ => unreachable!(),
    };
    args.extend(["--n", "24", "--servers", "36", "--ports", "7", "--seed", "1..2"]);
    args
}

const EXPERIMENTS: [&str; 8] = [
    "shortest_paths",
    "greedy_paths",
    "link_load",
    "forwarding_state",
    "bisection",
    "throughput",
    "failures",
    "key_routing",
];

fn run_tables(name: &str, out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut args = experiment_args(name);
    let out_s = out.to_str().unwrap().to_string();
    args.extend(["--out", &out_s]);
    let o = s2(&args);
    assert!(o.status.success(), "{name}: {}", stderr(&o));
    let mut tables: Vec<_> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    tables.sort();
    assert!(!tables.is_empty());
    tables
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in EXPERIMENTS {
        let a = run_tables(name, &dir.path().join(format!("{name}-a")));
        let b = run_tables(name, &dir.path().join(format!("{name}-b")));
        assert_eq!(a, b, "{name}");
    }
}

/// Compares every CSV table against `tests/golden/`; set `S2_BLESS=1` to
/// rewrite the golden files.
#[test]
fn golden_tables() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("S2_BLESS").is_some();
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    for name in EXPERIMENTS {
        for (file, bytes) in run_tables(name, &dir.path().join(name)) {
            let path = golden.join(&file);
            if bless {
                fs::write(&path, &bytes).unwrap();
            } else if fs::read(&path).ok().as_deref() != Some(&bytes[..]) {
                mismatched.push(file);
            }
        }
    }
    let build = s2(&["build", "--n", "24", "--servers", "36", "--ports", "7", "--seed", "3"]);
    assert!(build.status.success());
    let path = golden.join("build.json");
    if bless {
        fs::write(&path, &build.stdout).unwrap();
    } else if fs::read(&path).ok() != Some(build.stdout) {
        mismatched.push("build.json".into());
    }
    assert!(mismatched.is_empty(), "golden mismatch: {mismatched:?}");
}

#[test]
fn build_is_loadable_by_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let topo = build_nine_switch(dir.path());
    let o = s2(&["greedy-paths", "--topology", topo.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["results"]["success_rate"], 1.0);
}
