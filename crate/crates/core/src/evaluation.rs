//! Misclassification under the best label alignment, and the success rate of
//! a selection criterion relative to the best of the three candidates.

use serde::Serialize;

use crate::edgestats::Partition;
use crate::{Error, Result};

/// Default tolerance factor for [`success_rate`].
pub const DEFAULT_PSI: f64 = 0.1;

/// Fraction of mismatched labels, minimized over swapping the two labels.
pub fn misclassification_rate(truth: &Partition, est: &Partition) -> Result<f64> {
    if truth.len() != est.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), actual: est.len() });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let n = truth.len();
    let hamming = truth.labels().iter().zip(est.labels()).filter(|(a, b)| a != b).count();
    Ok(hamming.min(n - hamming) as f64 / n as f64)
}

/// Per-run errors of the criterion's pick and of each candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRecord {
    pub eps_criterion: f64,
    pub eps_d: f64,
    pub eps_w_min: f64,
    pub eps_w_max: f64,
    pub psi: f64,
}

impl EvalRecord {
    pub fn best_candidate(&self) -> f64 {
        self.eps_d.min(self.eps_w_min).min(self.eps_w_max)
    }

    /// `eps <= (1 + psi) * min(candidates)`, boundary included.
    pub fn is_success(&self) -> bool {
        self.eps_criterion <= (1.0 + self.psi) * self.best_candidate()
    }
}

pub fn success_rate(records: &[EvalRecord]) -> Result<f64> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidParameter("success rate needs at least one run".into()));
    };
    if records.iter().any(|r| r.psi != first.psi) {
        return Err(Error::InvalidParameter("records use different tolerances".into()));
    }
    if !(first.psi >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} is negative", first.psi)));
    }
    let hits = records.iter().filter(|r| r.is_success()).count();
    Ok(hits as f64 / records.len() as f64)
}
