//! End-to-end detection on one graph: fit, then (optionally) select.

use serde::Serialize;

use crate::edgestats::Partition;
use crate::graph::{Graph, GraphConstants};
use crate::optimizer::{greedy_fit, FitConfig, FitResult, Objective};
use crate::selection::{select, Candidate, Candidates, Criterion, SelectionOutcome, DEFAULT_LAMBDA};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Fit `Z_w`-max, `Z_w`-min and `Z_d`, then let the criterion choose.
    Auto,
    Single(Objective),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Single(o) => o.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name == "auto" {
            return Some(Method::Auto);
        }
        Objective::from_name(name).map(Method::Single)
    }
}

#[derive(Debug, Clone)]
pub struct DetectConfig {
    pub method: Method,
    pub criterion: Criterion,
    pub lambda: f64,
    pub fit: FitConfig,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig { method: Method::Auto, criterion: Criterion::Penalized, lambda: DEFAULT_LAMBDA, fit: FitConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    /// The objective whose labels were returned.
    pub selected: Objective,
    pub labels: Partition,
    /// Present for [`Method::Auto`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Candidates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionOutcome>,
    /// Present for [`Method::Single`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
}

impl Detection {
    pub fn selected_fit(&self) -> &FitResult {
        match (&self.fit, &self.candidates, &self.selection) {
            (Some(f), _, _) => f,
            (None, Some(c), Some(s)) => c.get(s.selected),
            _ => unreachable!("detection carries either a single fit or candidates"),
        }
    }
}

/// Fits the three candidates with the same configuration.
pub fn fit_candidates(g: &Graph, c: &GraphConstants, cfg: &FitConfig) -> Result<Candidates> {
    let run = |cand: Candidate| greedy_fit(g, c, cand.objective(), cfg);
    #[cfg(feature = "parallel")]
    let (zw_max, (zw_min, zd)) = rayon::join(|| run(Candidate::ZwMax), || rayon::join(|| run(Candidate::ZwMin), || run(Candidate::Zd)));
    #[cfg(not(feature = "parallel"))]
    let (zw_max, zw_min, zd) = (run(Candidate::ZwMax), run(Candidate::ZwMin), run(Candidate::Zd));
    Ok(Candidates { zw_max: zw_max?, zw_min: zw_min?, zd: zd? })
}

pub fn detect(g: &Graph, cfg: &DetectConfig) -> Result<Detection> {
    let c = GraphConstants::of(g);
    match cfg.method {
        Method::Single(obj) => {
            let fit = greedy_fit(g, &c, obj, &cfg.fit)?;
            if fit.degenerate {
                return Err(Error::AllDegenerate);
            }
            Ok(Detection { selected: obj, labels: fit.labels.clone(), candidates: None, selection: None, fit: Some(fit) })
        }
        Method::Auto => {
            let cands = fit_candidates(g, &c, &cfg.fit)?;
            let sel = select(g, &cands, cfg.criterion, cfg.lambda)?;
            let chosen = cands.get(sel.selected);
            Ok(Detection {
                selected: chosen.objective,
                labels: chosen.labels.clone(),
                candidates: Some(cands),
                selection: Some(sel),
                fit: None,
            })
        }
    }
}
