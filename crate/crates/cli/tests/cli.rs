use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use edgecount::genmodels::{replicate_rng, sample_sbm, ConnectivityMatrix};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgecount"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn two_k5_bridge() -> String {
    let mut body = String::from("a4 b0\n");
    for prefix in ["a", "b"] {
        for i in 0..5 {
            for j in i + 1..5 {
                body.push_str(&format!("{prefix}{i} {prefix}{j}\n"));
            }
        }
    }
    body
}

/// Edge list of an SBM draw; node ids are `t{i}` for the first `m`, `f{i}` after.
fn sbm_edges(p: [f64; 4], directed: bool, seed: u64) -> String {
    let p = ConnectivityMatrix::new(p[0], p[1], p[2], p[3]).unwrap();
    let pg = sample_sbm(&p, 50, 50, directed, &mut replicate_rng(seed, 0)).unwrap();
    let name = |i: usize| if i < 50 { format!("t{i}") } else { format!("f{i}") };
    pg.graph.edges().iter().map(|&(u, v)| format!("{} {}\n", name(u), name(v))).collect()
}

fn error_vs_planted(report: &Value) -> f64 {
    let ids = report["node_ids"].as_array().unwrap();
    let labels = report["labels"].as_array().unwrap();
    let n = ids.len();
    let wrong = ids.iter().zip(labels).filter(|(id, l)| id.as_str().unwrap().starts_with('t') != (l.as_u64() == Some(1))).count();
    wrong.min(n - wrong) as f64 / n as f64
}

#[test]
fn moments_examples() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "1 2\n2 3\n3 4\n4 1\n");
    let l = write(&dir, "c4.lab", "1\n1\n0\n0\n");
    let r = json(&run(&["moments", "--edges", s(&c4), "--labels", s(&l), "--undirected"]));
    assert!((r["z_w"].as_f64().unwrap() - 0.70711).abs() < 1e-5);
    assert_eq!(r["constants"]["q2"], 4);

    let p4 = write(&dir, "p4.txt", "1 2\n2 3\n3 4\n");
    let l = write(&dir, "p4.lab", "0\n1\n1\n0\n");
    let r = json(&run(&["moments", "--edges", s(&p4), "--labels", s(&l), "--undirected"]));
    assert!((r["z_d"].as_f64().unwrap() - 1.73205).abs() < 1e-5);

    let k4 = write(&dir, "k4.txt", "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
    let l = write(&dir, "k4.lab", "1\n0\n1\n0\n");
    let r = json(&run(&["moments", "--edges", s(&k4), "--labels", s(&l), "--undirected"]));
    assert_eq!(r["degenerate_w"], true);
    assert_eq!(r["degenerate_d"], true);
    assert_eq!(r["z_w"], 0.0);
    assert_eq!(r["z_d"], 0.0);
}

#[test]
fn moments_accepts_keyed_labels() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "1 2\n2 3\n3 4\n4 1\n");
    let l = write(&dir, "keyed.lab", "4 B\n3 B\n2 A\n1 A\n");
    let r = json(&run(&["moments", "--edges", s(&c4), "--labels", s(&l), "--undirected"]));
    assert!((r["z_w"].as_f64().unwrap() - 0.70711).abs() < 1e-5);
}

#[test]
fn detect_splits_bridged_cliques() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "k5.txt", &two_k5_bridge());
    let r = json(&run(&["detect", "--edges", s(&e), "--undirected", "--method", "zw-max"]));
    let ids = r["node_ids"].as_array().unwrap();
    let labels = r["labels"].as_array().unwrap();
    let side = |prefix: &str| -> Vec<&Value> { ids.iter().zip(labels).filter(|(id, _)| id.as_str().unwrap().starts_with(prefix)).map(|(_, l)| l).collect() };
    let (a, b) = (side("a"), side("b"));
    assert!(a.iter().all(|l| *l == a[0]));
    assert!(b.iter().all(|l| *l == b[0]));
    assert_ne!(a[0], b[0]);
    assert_eq!(r["selected"], "zw-max");
    assert_eq!(r["group_sizes"], serde_json::json!([5, 5]));
    for key in ["seed", "restarts", "runtime_ms", "statistic", "candidates"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn detect_auto_on_core_periphery_selects_difference() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "cp.txt", &sbm_edges([0.5, 0.3, 0.3, 0.1], false, 31));
    let r = json(&run(&["detect", "--edges", s(&e), "--undirected"]));
    assert_eq!(r["selected"], "zd");
    assert_eq!(r["selection"]["criterion"], "penalized");
    assert_eq!(r["candidates"].as_array().unwrap().len(), 3);
    assert!(error_vs_planted(&r) <= 0.1);
}

#[test]
fn detect_gamma_tau_on_assortative_selects_weighted_max() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "as.txt", &sbm_edges([0.5, 0.3, 0.3, 0.5], true, 32));
    let r = json(&run(&["detect", "--edges", s(&e), "--directed", "--criterion", "gamma-tau"]));
    assert_eq!(r["selected"], "zw-max");
    let scores = r["selection"]["scores"].as_array().unwrap();
    assert_eq!(scores.len(), 3);
}

#[test]
fn warm_start_round_trips() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "cp.txt", &sbm_edges([0.5, 0.3, 0.3, 0.1], false, 33));
    let first = run(&["detect", "--edges", s(&e), "--undirected", "--method", "zd", "--seed", "3"]);
    let report = write(&dir, "report.json", std::str::from_utf8(&first.stdout).unwrap());
    let a = json(&first);
    let b = json(&run(&["detect", "--edges", s(&e), "--undirected", "--method", "zd", "--restarts", "1", "--warm-start", s(&report)]));
    assert_eq!(a["statistic"], b["statistic"]);
    assert_eq!(b["candidates"][0]["restart_values"].as_array().unwrap().len(), 1);

    let short = write(&dir, "short.lab", "1\n0\n1\n");
    let out = run(&["detect", "--edges", s(&e), "--undirected", "--warm-start", s(&short)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fixed_seed_reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "cp.txt", &sbm_edges([0.5, 0.3, 0.3, 0.1], true, 34));
    let go = || {
        let mut v = json(&run(&["detect", "--edges", s(&e), "--directed", "--seed", "9"]));
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(go(), go());
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let args = ["simulate", "--p11", "0.5", "--p12", "0.3", "--p22", "0.5", "--m", "20", "--n", "20", "--undirected", "--reps", "1", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rep,eps_zw_max,eps_zw_min,eps_zd,choice,eps_choice,success,tie");
    assert!(lines[1].starts_with("0,"));
    assert!(lines[2].starts_with("mean,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn simulate_core_periphery_gap() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cp.csv");
    let status = bin()
        .args(["simulate", "--p11", "0.5", "--p12", "0.3", "--p22", "0.1", "--m", "50", "--n", "50", "--undirected"])
        .args(["--reps", "50", "--seed", "12", "--out", s(&out)])
        .status()
        .unwrap();
    assert!(status.success());
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 51);
    let mean = &rows[50];
    assert_eq!(&mean[0], "mean");
    let zw_max: f64 = mean[1].parse().unwrap();
    let zd: f64 = mean[3].parse().unwrap();
    assert!(zd <= 0.05, "zd {zd}");
    assert!(zw_max >= 0.3, "zw-max {zw_max}");
}

#[test]
fn simulate_rejects_bad_parameters() {
    let base = ["simulate", "--p11", "0.5", "--p12", "0.3", "--p22", "0.1", "--m", "10", "--n", "10"];
    let code = |extra: &[&str]| bin().args(base).args(extra).output().unwrap().status.code();
    assert_eq!(code(&["--undirected", "--p21", "0.2"]), Some(2));
    assert_eq!(code(&["--directed", "--theta", "pareto:0.5", "--model", "dcsbm"]), Some(2));
    assert_eq!(code(&["--directed", "--theta", "pareto:3"]), Some(2));
    assert_eq!(code(&["--directed", "--reps", "0"]), Some(2));
    let out = bin().args(["simulate", "--p11", "1.5", "--p12", "0.3", "--p22", "0.1", "--m", "10", "--n", "10", "--directed"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_examples() {
    let dir = TempDir::new().unwrap();
    let truth: String = (0..100).map(|i| if i < 50 { "x\n" } else { "y\n" }).collect();
    let t = write(&dir, "t.lab", &truth);
    let flipped: String = truth.lines().map(|l| if l == "x" { "y\n" } else { "x\n" }).collect();
    let c = write(&dir, "c.lab", &flipped);
    let mut one_off: Vec<&str> = truth.lines().collect();
    one_off[7] = "y";
    let o = write(&dir, "o.lab", &(one_off.join("\n") + "\n"));
    let rate = |est: &Path| -> f64 {
        let out = run(&["eval", "--truth", s(&t), "--est", s(est)]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap().trim().parse().unwrap()
    };
    assert_eq!(rate(&t), 0.0);
    assert_eq!(rate(&c), 0.0);
    assert_eq!(rate(&o), 0.01);

    let three = write(&dir, "three.lab", "a\nb\nc\n");
    assert_eq!(run(&["eval", "--truth", s(&three), "--est", s(&three)]).status.code(), Some(3));
    let short = write(&dir, "short.lab", "x\ny\n");
    assert_eq!(run(&["eval", "--truth", s(&t), "--est", s(&short)]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(run(&["detect", "--edges", s(&missing), "--undirected"]).status.code(), Some(3));

    let bad = write(&dir, "bad.txt", "1 2\n2 3 4\n");
    let out = run(&["detect", "--edges", s(&bad), "--undirected"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let looped = write(&dir, "loop.txt", "1 2\n3 3\n");
    assert_eq!(run(&["detect", "--edges", s(&looped), "--directed"]).status.code(), Some(3));

    let tiny = write(&dir, "tiny.txt", "a b\nb c\n");
    assert_eq!(run(&["detect", "--edges", s(&tiny), "--directed"]).status.code(), Some(3));

    let ok = write(&dir, "k5.txt", &two_k5_bridge());
    assert_eq!(run(&["detect", "--edges", s(&ok), "--undirected", "--lambda", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["detect", "--edges", s(&ok), "--undirected", "--method", "louvain"]).status.code(), Some(2));
    assert_eq!(run(&["detect", "--edges", s(&ok), "--undirected", "--directed"]).status.code(), Some(2));

    // every split of a complete graph has zero null variance
    let mut k6 = String::new();
    for i in 0..6 {
        for j in i + 1..6 {
            k6.push_str(&format!("{i} {j}\n"));
        }
    }
    let k6 = write(&dir, "k6.txt", &k6);
    assert_eq!(run(&["detect", "--edges", s(&k6), "--undirected"]).status.code(), Some(4));
}
