//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws on a
//! canvas. The work is done by plain functions so they can be tested natively.

use edgecount::detect::fit_candidates;
use edgecount::edgestats::{edge_stats, modularity_q, q_d};
use edgecount::evaluation::misclassification_rate;
use edgecount::genmodels::{replicate_rng, sample_sbm, ConnectivityMatrix};
use edgecount::graph::{load_edge_list, GraphConstants};
use edgecount::optimizer::FitConfig;
use edgecount::oracle::verify_extremum_grid;
use edgecount::selection::{select, Candidate, Criterion, DEFAULT_LAMBDA};
use edgecount::Partition;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest group size the detection demo accepts; keeps the page responsive.
pub const MAX_GROUP: usize = 150;

fn matrix(p: [f64; 4], directed: bool) -> Result<ConnectivityMatrix, String> {
    let p21 = if directed { p[2] } else { p[1] };
    ConnectivityMatrix::new(p[0], p[1], p21, p[3]).map_err(|e| e.to_string())
}

/// Standardized expected signal of both statistics over every misplacement.
pub fn grid_json(p: [f64; 4], m: usize, n: usize) -> Result<Value, String> {
    let r = verify_extremum_grid(&matrix(p, true)?, m, n).map_err(|e| e.to_string())?;
    Ok(json!({
        "m": r.m,
        "n": r.n,
        "lead_d": r.lead_d,
        "lead_w": r.lead_w,
        "zd_argmax": r.zd_argmax,
        "zw_extremum": r.zw_extremum,
        "zd_holds": r.zd_holds,
        "zw_holds": r.zw_holds,
        "cells": r.cells.iter().map(|c| json!([c.0, c.1, c.2, c.3])).collect::<Vec<_>>(),
    }))
}

/// Draws an SBM graph, fits all three candidates and applies the criterion.
pub fn detect_json(p: [f64; 4], m: usize, n: usize, directed: bool, criterion: &str, seed: u64) -> Result<Value, String> {
    if m > MAX_GROUP || n > MAX_GROUP {
        return Err(format!("groups are limited to {MAX_GROUP} nodes in the demo"));
    }
    let criterion = Criterion::from_name(criterion).ok_or_else(|| format!("unknown criterion `{criterion}`"))?;
    let pg = sample_sbm(&matrix(p, directed)?, m, n, directed, &mut replicate_rng(seed, 0)).map_err(|e| e.to_string())?;
    let g = &pg.graph;
    let c = GraphConstants::of(g);
    let cands = fit_candidates(g, &c, &FitConfig::with_restarts(10, seed)).map_err(|e| e.to_string())?;
    let sel = select(g, &cands, criterion, DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
    let mut fits = Vec::new();
    for k in Candidate::ALL {
        let f = cands.get(k);
        let err = misclassification_rate(&pg.truth, &f.labels).map_err(|e| e.to_string())?;
        let score = sel.score_of(k).map(|s| s.score);
        fits.push(json!({
            "method": k.name(),
            "labels": f.labels.labels(),
            "statistic": f.statistic(),
            "error": err,
            "score": score,
            "degenerate": f.degenerate,
        }));
    }
    Ok(json!({
        "nodes": g.node_count(),
        "directed": directed,
        "edges": g.edges(),
        "truth": pg.truth.labels(),
        "criterion": criterion.name(),
        "selected": sel.selected.name(),
        "tie": sel.tie,
        "candidates": fits,
    }))
}

/// Statistics of a pasted edge list under pasted labels (one per line, in
/// first-appearance order of the nodes).
pub fn moments_json(edges: &str, labels: &str, directed: bool) -> Result<Value, String> {
    let loaded = load_edge_list(edges.as_bytes(), directed).map_err(|e| e.to_string())?;
    let tokens: Vec<&str> = labels.split_whitespace().collect();
    let n = loaded.graph.node_count();
    if tokens.len() != n {
        return Err(format!("{} labels for {n} nodes", tokens.len()));
    }
    let bits = tokens.iter().map(|t| match *t {
        "1" => Ok(1),
        "0" => Ok(0),
        other => Err(format!("label `{other}` is not 0 or 1")),
    });
    let x = Partition::new(bits.collect::<Result<Vec<u8>, String>>()?).map_err(|e| e.to_string())?;
    let g = &loaded.graph;
    let c = GraphConstants::of(g);
    let s = edge_stats(g, &c, &x).map_err(|e| e.to_string())?;
    Ok(json!({
        "node_ids": loaded.node_ids,
        "stats": s,
        "q": modularity_q(g, &x).ok(),
        "q_d": q_d(g, &x).ok(),
        "constants": c,
    }))
}

fn finish(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn extremum_grid(p11: f64, p12: f64, p21: f64, p22: f64, m: usize, n: usize) -> Result<String, JsValue> {
    finish(grid_json([p11, p12, p21, p22], m, n))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sample_and_detect(
    p11: f64,
    p12: f64,
    p21: f64,
    p22: f64,
    m: usize,
    n: usize,
    directed: bool,
    criterion: &str,
    seed: u32,
) -> Result<String, JsValue> {
    finish(detect_json([p11, p12, p21, p22], m, n, directed, criterion, seed as u64))
}

#[wasm_bindgen]
pub fn labelled_moments(edges: &str, labels: &str, directed: bool) -> Result<String, JsValue> {
    finish(moments_json(edges, labels, directed))
}
