use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use edgecount::detect::{detect as run_detect, DetectConfig, Detection, Method};
use edgecount::edgestats::{edge_stats, modularity_q, q_d};
use edgecount::evaluation::misclassification_rate;
use edgecount::genmodels::{ConnectivityMatrix, ThetaSpec};
use edgecount::graph::{load_edge_list, GraphConstants, LoadedGraph};
use edgecount::optimizer::{FitConfig, Objective};
use edgecount::selection::{Candidate, CandidateScore, Criterion};
use edgecount::sweep::{run_sweep, summarize, SweepConfig};
use edgecount::{MomentSet, Partition};
use serde::Serialize;

use crate::labels::{read_graph_labels, read_label_file};
use crate::{CliError, CriterionArg, DetectArgs, Direction, EvalArgs, MethodArg, ModelArg, MomentsArgs, SimulateArgs};

impl Direction {
    fn is_directed(&self) -> bool {
        self.directed
    }
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Penalized => Criterion::Penalized,
            CriterionArg::GammaTau => Criterion::GammaTau,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::ZwMax => Method::Single(Objective::ZwMax),
            MethodArg::ZwMin => Method::Single(Objective::ZwMin),
            MethodArg::Zd => Method::Single(Objective::ZdMax),
            MethodArg::Modularity => Method::Single(Objective::QMax),
            MethodArg::Qd => Method::Single(Objective::QdMax),
        }
    }
}

fn load_graph(path: &Path, directed: bool) -> Result<LoadedGraph, CliError> {
    let file = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    load_edge_list(BufReader::new(file), directed).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, body: &[u8]) -> Result<(), CliError> {
    let res = match out {
        Some(p) => std::fs::write(p, body),
        None => io::stdout().lock().write_all(body),
    };
    res.map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("report types serialize");
    s.push(b'\n');
    s
}

#[derive(Serialize)]
struct CandidateReport<'a> {
    method: &'static str,
    labels: &'a [u8],
    statistic: f64,
    degenerate: bool,
    restart_values: &'a [f64],
}

#[derive(Serialize)]
struct SelectionReport<'a> {
    criterion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    scores: &'a [CandidateScore],
    tie: bool,
}

#[derive(Serialize)]
struct DetectReport<'a> {
    method: &'static str,
    directed: bool,
    nodes: usize,
    edges: usize,
    duplicate_edges: usize,
    node_ids: &'a [String],
    selected: &'static str,
    labels: &'a [u8],
    /// `[label-1 count, label-0 count]`.
    group_sizes: [usize; 2],
    statistic: f64,
    candidates: Vec<CandidateReport<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selection: Option<SelectionReport<'a>>,
    seed: u64,
    restarts: usize,
    warm_start: bool,
    runtime_ms: u128,
}

fn detect_report<'a>(args: &DetectArgs, loaded: &'a LoadedGraph, d: &'a Detection, started: Instant) -> DetectReport<'a> {
    let candidates = match &d.candidates {
        Some(c) => Candidate::ALL.iter().map(|&k| c.get(k)).collect(),
        None => vec![d.selected_fit()],
    };
    let candidates = candidates
        .into_iter()
        .map(|f| CandidateReport {
            method: f.objective.name(),
            labels: f.labels.labels(),
            statistic: f.statistic(),
            degenerate: f.degenerate,
            restart_values: &f.restart_values,
        })
        .collect();
    let selection = d.selection.as_ref().map(|s| SelectionReport {
        criterion: s.criterion.name(),
        lambda: s.lambda,
        scores: &s.scores,
        tie: s.tie,
    });
    DetectReport {
        method: Method::from(args.method).name(),
        directed: loaded.graph.is_directed(),
        nodes: loaded.graph.node_count(),
        edges: loaded.graph.edge_count(),
        duplicate_edges: loaded.duplicates,
        node_ids: &loaded.node_ids,
        selected: d.selected.name(),
        labels: d.labels.labels(),
        group_sizes: [d.labels.ones(), d.labels.zeros()],
        statistic: d.selected_fit().statistic(),
        candidates,
        selection,
        seed: args.seed,
        restarts: args.restarts,
        warm_start: args.warm_start.is_some(),
        runtime_ms: started.elapsed().as_millis(),
    }
}

pub fn detect(args: DetectArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if !(args.lambda >= 0.0) {
        return Err(CliError::Usage(format!("--lambda must be non-negative, got {}", args.lambda)));
    }
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }
    let loaded = load_graph(&args.edges, args.direction.is_directed())?;
    let warm_start = match &args.warm_start {
        Some(p) => Some(read_graph_labels(p, &loaded)?),
        None => None,
    };
    let cfg = DetectConfig {
        method: args.method.into(),
        criterion: args.criterion.into(),
        lambda: args.lambda,
        fit: FitConfig { restarts: args.restarts, seed: args.seed, warm_start, ..FitConfig::default() },
    };
    let d = run_detect(&loaded.graph, &cfg)?;
    let report = detect_report(&args, &loaded, &d, started);
    write_output(args.out.as_deref(), &to_json(&report))
}

fn f(v: f64) -> String {
    format!("{v}")
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let directed = args.direction.is_directed();
    let p21 = args.p21.unwrap_or(args.p12);
    let p = ConnectivityMatrix::new(args.p11, args.p12, p21, args.p22)?;
    if !directed && !p.is_symmetric() {
        return Err(CliError::Usage("undirected graphs need --p21 equal to --p12".into()));
    }
    if args.m < 2 || args.n < 2 {
        return Err(CliError::Usage("--m and --n must both be at least 2".into()));
    }
    if args.reps == 0 || args.restarts == 0 {
        return Err(CliError::Usage("--reps and --restarts must be at least 1".into()));
    }
    if !(args.lambda >= 0.0) {
        return Err(CliError::Usage(format!("--lambda must be non-negative, got {}", args.lambda)));
    }
    let theta: ThetaSpec = args.theta.parse().map_err(|e: edgecount::Error| CliError::Usage(e.to_string()))?;
    if matches!(args.model, ModelArg::Sbm) && theta != ThetaSpec::Constant1 {
        return Err(CliError::Usage("--model sbm takes no --theta; use --model dcsbm".into()));
    }
    let cfg = SweepConfig {
        p,
        m: args.m,
        n: args.n,
        theta,
        directed,
        reps: args.reps,
        seed: args.seed,
        criterion: args.criterion.into(),
        lambda: args.lambda,
        restarts: args.restarts,
        jobs: args.jobs,
    };
    let rows = run_sweep(&cfg)?;
    let summary = summarize(&rows)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(["rep", "eps_zw_max", "eps_zw_min", "eps_zd", "choice", "eps_choice", "success", "tie"]).map_err(io_err)?;
    for r in &rows {
        w.write_record([
            r.rep.to_string(),
            f(r.eps_zw_max),
            f(r.eps_zw_min),
            f(r.eps_zd),
            r.choice.name().to_string(),
            f(r.eps_choice),
            u8::from(r.success).to_string(),
            u8::from(r.tie).to_string(),
        ])
        .map_err(io_err)?;
    }
    w.write_record([
        "mean".to_string(),
        f(summary.eps_zw_max),
        f(summary.eps_zw_min),
        f(summary.eps_zd),
        String::new(),
        f(summary.eps_choice),
        f(summary.success_rate),
        String::new(),
    ])
    .map_err(io_err)?;
    let body = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    write_output(args.out.as_deref(), &body)
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let truth = Partition::new(read_label_file(&args.truth)?)?;
    let est = Partition::new(read_label_file(&args.est)?)?;
    let rate = misclassification_rate(&truth, &est)?;
    println!("{rate}");
    Ok(())
}

#[derive(Serialize)]
struct MomentsReport<'a> {
    directed: bool,
    r1: u64,
    r2: u64,
    r_w: f64,
    r_d: f64,
    #[serde(flatten)]
    moments: MomentSet,
    z_w: f64,
    z_d: f64,
    q: Option<f64>,
    q_d: Option<f64>,
    constants: GraphConstants,
    group_sizes: [usize; 2],
    node_ids: &'a [String],
}

pub fn moments(args: MomentsArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.edges, args.direction.is_directed())?;
    let x = read_graph_labels(&args.labels, &loaded)?;
    let g = &loaded.graph;
    let c = GraphConstants::of(g);
    let s = edge_stats(g, &c, &x)?;
    let report = MomentsReport {
        directed: g.is_directed(),
        r1: s.r1,
        r2: s.r2,
        r_w: s.r_w,
        r_d: s.r_d,
        moments: s.moments,
        z_w: s.z_w,
        z_d: s.z_d,
        q: modularity_q(g, &x).ok(),
        q_d: q_d(g, &x).ok(),
        constants: c,
        group_sizes: [x.ones(), x.zeros()],
        node_ids: &loaded.node_ids,
    };
    write_output(args.out.as_deref(), &to_json(&report))
}
