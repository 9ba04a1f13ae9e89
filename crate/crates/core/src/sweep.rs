//! Replicated simulation runs on planted-partition graphs.
//!
//! Replicate `r` is a pure function of `(config, r)`, so output does not
//! depend on how many workers ran or in which order they finished.

use rand::Rng;
use serde::Serialize;

use crate::detect::fit_candidates;
use crate::evaluation::{misclassification_rate, EvalRecord, DEFAULT_PSI};
use crate::genmodels::{replicate_rng, sample_dcsbm, ConnectivityMatrix, ThetaSpec};
use crate::graph::GraphConstants;
use crate::optimizer::FitConfig;
use crate::selection::{select, Candidate, Criterion, DEFAULT_LAMBDA};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub p: ConnectivityMatrix,
    pub m: usize,
    pub n: usize,
    pub theta: ThetaSpec,
    pub directed: bool,
    pub reps: usize,
    pub seed: u64,
    pub criterion: Criterion,
    pub lambda: f64,
    pub restarts: usize,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(p: ConnectivityMatrix, m: usize, n: usize, directed: bool) -> Self {
        SweepConfig {
            p,
            m,
            n,
            theta: ThetaSpec::Constant1,
            directed,
            reps: 50,
            seed: 0,
            criterion: Criterion::Penalized,
            lambda: DEFAULT_LAMBDA,
            restarts: 20,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub rep: usize,
    pub eps_zw_max: f64,
    pub eps_zw_min: f64,
    pub eps_zd: f64,
    pub choice: Candidate,
    pub eps_choice: f64,
    pub success: bool,
    pub tie: bool,
}

impl ReplicateRow {
    pub fn eps(&self, c: Candidate) -> f64 {
        match c {
            Candidate::ZwMax => self.eps_zw_max,
            Candidate::ZwMin => self.eps_zw_min,
            Candidate::Zd => self.eps_zd,
        }
    }

    pub fn record(&self) -> EvalRecord {
        EvalRecord {
            eps_criterion: self.eps_choice,
            eps_d: self.eps_zd,
            eps_w_min: self.eps_zw_min,
            eps_w_max: self.eps_zw_max,
            psi: DEFAULT_PSI,
        }
    }
}

/// Column means over a set of replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub reps: usize,
    pub eps_zw_max: f64,
    pub eps_zw_min: f64,
    pub eps_zd: f64,
    pub eps_choice: f64,
    pub success_rate: f64,
}

pub fn summarize(rows: &[ReplicateRow]) -> Result<SweepSummary> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no replicates to summarize".into()));
    }
    let k = rows.len() as f64;
    let mean = |f: fn(&ReplicateRow) -> f64| rows.iter().map(f).sum::<f64>() / k;
    Ok(SweepSummary {
        reps: rows.len(),
        eps_zw_max: mean(|r| r.eps_zw_max),
        eps_zw_min: mean(|r| r.eps_zw_min),
        eps_zd: mean(|r| r.eps_zd),
        eps_choice: mean(|r| r.eps_choice),
        success_rate: mean(|r| r.success as u8 as f64),
    })
}

pub fn run_replicate(cfg: &SweepConfig, rep: usize) -> Result<ReplicateRow> {
    let mut rng = replicate_rng(cfg.seed, rep as u64);
    let planted = sample_dcsbm(&cfg.p, cfg.m, cfg.n, cfg.theta, cfg.directed, &mut rng)?.shuffled(&mut rng)?;
    let g = &planted.graph;
    let c = GraphConstants::of(g);
    let fit_cfg = FitConfig::with_restarts(cfg.restarts, rng.random());
    let cands = fit_candidates(g, &c, &fit_cfg)?;
    let sel = select(g, &cands, cfg.criterion, cfg.lambda)?;
    let eps = |cand: Candidate| misclassification_rate(&planted.truth, &cands.get(cand).labels);
    let mut row = ReplicateRow {
        rep,
        eps_zw_max: eps(Candidate::ZwMax)?,
        eps_zw_min: eps(Candidate::ZwMin)?,
        eps_zd: eps(Candidate::Zd)?,
        choice: sel.selected,
        eps_choice: 0.0,
        success: false,
        tie: sel.tie,
    };
    row.eps_choice = row.eps(sel.selected);
    row.success = row.record().is_success();
    Ok(row)
}

/// All replicates, ordered by replicate index.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ReplicateRow>> {
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.reps).into_par_iter().map(|r| run_replicate(cfg, r)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.reps).map(|r| run_replicate(cfg, r)).collect()
    }
}
