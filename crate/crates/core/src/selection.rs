//! Choosing among the `Z_w`-max, `Z_w`-min and `Z_d` fits.
//!
//! Two criteria are offered. The γ-τ criterion compares plug-in signal
//! strengths (`Nγ̂²` for the difference statistic, `Nτ̂²` for the weighted
//! one). The penalized criterion scores each fit by a degree-corrected
//! Bernoulli log-likelihood minus a penalty on degree heterogeneity.

use serde::Serialize;

use crate::edgestats::{within_counts, Partition, MIN_GROUP};
use crate::genmodels::ConnectivityMatrix;
use crate::graph::Graph;
use crate::optimizer::{FitResult, Objective};
use crate::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.12;

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` inside the log-likelihood.
pub const PROB_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Candidate {
    ZwMax,
    ZwMin,
    Zd,
}

impl Candidate {
    /// Also the tie-break order.
    pub const ALL: [Candidate; 3] = [Candidate::ZwMax, Candidate::ZwMin, Candidate::Zd];

    pub fn objective(self) -> Objective {
        match self {
            Candidate::ZwMax => Objective::ZwMax,
            Candidate::ZwMin => Objective::ZwMin,
            Candidate::Zd => Objective::ZdMax,
        }
    }

    pub fn name(self) -> &'static str {
        self.objective().name()
    }

    fn is_weighted(self) -> bool {
        !matches!(self, Candidate::Zd)
    }
}

/// The three fits a selection criterion chooses between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidates {
    pub zw_max: FitResult,
    pub zw_min: FitResult,
    pub zd: FitResult,
}

impl Candidates {
    pub fn get(&self, c: Candidate) -> &FitResult {
        match c {
            Candidate::ZwMax => &self.zw_max,
            Candidate::ZwMin => &self.zw_min,
            Candidate::Zd => &self.zd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Penalized,
    GammaTau,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Penalized => "penalized",
            Criterion::GammaTau => "gamma-tau",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Criterion::Penalized, Criterion::GammaTau].into_iter().find(|c| c.name() == name)
    }
}

/// Plug-in block densities and group proportions for one partition.
/// Index 0 is the group labelled 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockEstimates {
    pub p_hat: ConnectivityMatrix,
    pub pi_hat: (f64, f64),
    pub sizes: (usize, usize),
}

pub fn estimate_block_probs(g: &Graph, x: &Partition) -> Result<BlockEstimates> {
    let n = g.node_count();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: x.len() });
    }
    let (m1, m0) = (x.ones(), x.zeros());
    if m1 < MIN_GROUP || m0 < MIN_GROUP {
        return Err(Error::GroupTooSmall { ones: m1, zeros: m0, min: MIN_GROUP });
    }
    // counts[a][b]: edges from block a to block b, block 0 = label 1
    let mut counts = [[0u64; 2]; 2];
    for &(u, v) in g.edges() {
        let a = 1 - x.label(u) as usize;
        let b = 1 - x.label(v) as usize;
        counts[a][b] += 1;
    }
    let (s1, s0) = (m1 as f64, m0 as f64);
    let p = if g.is_directed() {
        ConnectivityMatrix::new(
            counts[0][0] as f64 / (s1 * (s1 - 1.0)),
            counts[0][1] as f64 / (s1 * s0),
            counts[1][0] as f64 / (s0 * s1),
            counts[1][1] as f64 / (s0 * (s0 - 1.0)),
        )?
    } else {
        let cross = (counts[0][1] + counts[1][0]) as f64 / (s1 * s0);
        ConnectivityMatrix::symmetric(
            counts[0][0] as f64 / (s1 * (s1 - 1.0) / 2.0),
            cross,
            counts[1][1] as f64 / (s0 * (s0 - 1.0) / 2.0),
        )?
    };
    Ok(BlockEstimates { p_hat: p, pi_hat: (s1 / n as f64, s0 / n as f64), sizes: (m1, m0) })
}

/// `(2π₁P₁₁ − 2π₂P₂₂ − (π₁−π₂)(P₁₂+P₂₁))² / max(P)`, or 0 when `P` is all zero.
pub fn gamma_sq(est: &BlockEstimates) -> f64 {
    let p = &est.p_hat;
    let max = p.max();
    if max <= 0.0 {
        return 0.0;
    }
    let (pi1, pi2) = est.pi_hat;
    let num = 2.0 * pi1 * p.p11() - 2.0 * pi2 * p.p22() - (pi1 - pi2) * (p.p12() + p.p21());
    num * num / max
}

/// `(P₁₁ + P₂₂ − P₁₂ − P₂₁)² / max(P)`, or 0 when `P` is all zero.
pub fn tau_sq(est: &BlockEstimates) -> f64 {
    let p = &est.p_hat;
    let max = p.max();
    if max <= 0.0 {
        return 0.0;
    }
    let num = p.p11() + p.p22() - p.p12() - p.p21();
    num * num / max
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaEstimates {
    pub theta_hat: Vec<f64>,
    /// Population variance of θ̂ within the group labelled 1.
    pub var_one: f64,
    /// Population variance of θ̂ within the group labelled 0.
    pub var_zero: f64,
}

/// Degree over the block's average degree (in plus out for directed graphs).
/// A block whose members all have degree zero gets θ̂ = 1 throughout.
pub fn theta_mle(g: &Graph, x: &Partition) -> Result<ThetaEstimates> {
    let n = g.node_count();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: x.len() });
    }
    if x.ones() == 0 || x.zeros() == 0 {
        return Err(Error::GroupTooSmall { ones: x.ones(), zeros: x.zeros(), min: 1 });
    }
    let mut degree_sum = [0.0f64; 2];
    let mut size = [0.0f64; 2];
    for i in 0..n {
        let b = x.label(i) as usize;
        degree_sum[b] += g.degree(i) as f64;
        size[b] += 1.0;
    }
    let avg = [degree_sum[0] / size[0], degree_sum[1] / size[1]];
    let theta_hat: Vec<f64> = (0..n)
        .map(|i| {
            let b = x.label(i) as usize;
            if avg[b] > 0.0 {
                g.degree(i) as f64 / avg[b]
            } else {
                1.0
            }
        })
        .collect();
    let mut sq = [0.0f64; 2];
    for (i, t) in theta_hat.iter().enumerate() {
        let b = x.label(i) as usize;
        // the block mean of θ̂ is 1 by construction
        sq[b] += (t - 1.0) * (t - 1.0);
    }
    Ok(ThetaEstimates { theta_hat, var_one: sq[1] / size[1], var_zero: sq[0] / size[0] })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenalizedLoglik {
    /// `loglik - penalty`.
    pub value: f64,
    pub loglik: f64,
    pub penalty: f64,
    /// Pairs whose model probability fell outside `[PROB_EPS, 1 - PROB_EPS]`.
    pub clamped: usize,
}

/// Degree-corrected Bernoulli log-likelihood of `g` under `x`, minus the
/// heterogeneity penalty that matches the candidate's statistic.
pub fn penalized_loglik(g: &Graph, x: &Partition, lambda: f64, kind: Candidate) -> Result<PenalizedLoglik> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be a non-negative number, got {lambda}")));
    }
    let est = estimate_block_probs(g, x)?;
    let theta = theta_mle(g, x)?;
    let n = g.node_count();
    let adj = g.adjacency();
    let t = &theta.theta_hat;
    let labels = x.labels();
    let mut loglik = 0.0;
    let mut clamped = 0usize;
    for i in 0..n {
        let js = if g.is_directed() { 0..n } else { 0..i };
        for j in js {
            if i == j {
                continue;
            }
            let raw = est.p_hat.between(labels[i], labels[j]) * t[i] * t[j];
            let p = if raw < PROB_EPS {
                clamped += 1;
                PROB_EPS
            } else if raw > 1.0 - PROB_EPS {
                clamped += 1;
                1.0 - PROB_EPS
            } else {
                raw
            };
            let a = if g.is_directed() { adj[i][j] } else { adj[i][j] | adj[j][i] };
            loglik += if a == 1 { p.ln() } else { (1.0 - p).ln() };
        }
    }
    let penalty = if kind.is_weighted() {
        lambda * (theta.var_one + theta.var_zero) * g.edge_count() as f64
    } else {
        let (r1, r2) = within_counts(g, x)?;
        lambda * (theta.var_one * r1 as f64).max(theta.var_zero * r2 as f64)
    };
    Ok(PenalizedLoglik { value: loglik - penalty, loglik, penalty, clamped })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub candidate: Candidate,
    /// `Nγ̂²`, `Nτ̂²` or the penalized log-likelihood, depending on the criterion.
    pub score: f64,
    /// Degenerate fits take no part in the argmax.
    pub excluded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalized: Option<PenalizedLoglik>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionOutcome {
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub selected: Candidate,
    pub scores: Vec<CandidateScore>,
    /// Another eligible candidate reached the same score, or all eligible
    /// candidates found the same split.
    pub tie: bool,
}

impl SelectionOutcome {
    pub fn score_of(&self, c: Candidate) -> Option<&CandidateScore> {
        self.scores.iter().find(|s| s.candidate == c)
    }
}

fn same_split(a: &Partition, b: &Partition) -> bool {
    a == b || *a == b.complement()
}

fn pick(criterion: Criterion, lambda: Option<f64>, cands: &Candidates, scores: Vec<CandidateScore>) -> Result<SelectionOutcome> {
    let mut best: Option<&CandidateScore> = None;
    for s in scores.iter().filter(|s| !s.excluded) {
        if best.is_none_or(|b| s.score > b.score) {
            best = Some(s);
        }
    }
    let best = best.ok_or(Error::AllDegenerate)?;
    let selected = best.candidate;
    let eligible: Vec<&CandidateScore> = scores.iter().filter(|s| !s.excluded).collect();
    let tol = 1e-12 * best.score.abs().max(1.0);
    let score_tie = eligible.iter().any(|s| s.candidate != selected && (s.score - best.score).abs() <= tol);
    let split_tie = eligible.len() > 1
        && eligible.iter().all(|s| same_split(&cands.get(s.candidate).labels, &cands.get(selected).labels));
    Ok(SelectionOutcome { criterion, lambda, selected, scores, tie: score_tie || split_tie })
}

/// `Nγ̂²` from the `Z_d` fit against `Nτ̂²` from each `Z_w` fit; largest wins.
pub fn gamma_tau_select(g: &Graph, cands: &Candidates) -> Result<SelectionOutcome> {
    let n = g.node_count() as f64;
    let mut scores = Vec::with_capacity(3);
    for c in Candidate::ALL {
        let fit = cands.get(c);
        let est = estimate_block_probs(g, &fit.labels)?;
        let s = if c.is_weighted() { tau_sq(&est) } else { gamma_sq(&est) };
        scores.push(CandidateScore { candidate: c, score: n * s, excluded: fit.degenerate, penalized: None });
    }
    pick(Criterion::GammaTau, None, cands, scores)
}

pub fn penalized_select(g: &Graph, cands: &Candidates, lambda: f64) -> Result<SelectionOutcome> {
    let mut scores = Vec::with_capacity(3);
    for c in Candidate::ALL {
        let fit = cands.get(c);
        let pl = penalized_loglik(g, &fit.labels, lambda, c)?;
        scores.push(CandidateScore { candidate: c, score: pl.value, excluded: fit.degenerate, penalized: Some(pl) });
    }
    pick(Criterion::Penalized, Some(lambda), cands, scores)
}

pub fn select(g: &Graph, cands: &Candidates, criterion: Criterion, lambda: f64) -> Result<SelectionOutcome> {
    match criterion {
        Criterion::GammaTau => gamma_tau_select(g, cands),
        Criterion::Penalized => penalized_select(g, cands, lambda),
    }
}
