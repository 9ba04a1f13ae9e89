//! Brute-force and population-level reference computations.
//!
//! Nothing here is used by the fitting code. These functions exist so the
//! closed forms elsewhere in the crate can be checked against something that
//! does not share their algebra.

use serde::Serialize;

use crate::edgestats::{within_counts, weighted_sum, Partition};
use crate::genmodels::ConnectivityMatrix;
use crate::graph::Graph;
use crate::{Error, Result};

pub const ENUMERATION_MAX_NODES: usize = 12;
pub const GRID_MAX_GROUP: usize = 30;

/// Exact moments of `R_w` and `R_d` over every labelling with `m_x` ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullMoments {
    pub mean_rw: f64,
    /// Population variance (divide by the number of labellings).
    pub var_rw: f64,
    pub mean_rd: f64,
    pub var_rd: f64,
    pub assignments: usize,
}

pub fn enumerate_null_moments(g: &Graph, m_x: usize) -> Result<NullMoments> {
    let n = g.node_count();
    if n > ENUMERATION_MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "enumeration is limited to {ENUMERATION_MAX_NODES} nodes, graph has {n}"
        )));
    }
    if m_x < 2 || m_x + 2 > n {
        return Err(Error::GroupTooSmall { ones: m_x, zeros: n.saturating_sub(m_x), min: 2 });
    }
    let mut rw = Vec::new();
    let mut rd = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m_x {
            continue;
        }
        let x = Partition::from_bools((0..n).map(|i| mask >> i & 1 == 1));
        let (r1, r2) = within_counts(g, &x)?;
        rw.push(weighted_sum(r1 as f64, r2 as f64, m_x, n - m_x));
        rd.push(r1 as f64 - r2 as f64);
    }
    let (mean_rw, var_rw) = mean_var(&rw);
    let (mean_rd, var_rd) = mean_var(&rd);
    Ok(NullMoments { mean_rw, var_rw, mean_rd, var_rd, assignments: rw.len() })
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = v.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / k;
    (mean, var)
}

/// Expected within-group counts under an SBM with `m` true ones and `n` true
/// zeros when `d1` true ones are labelled 0 and `d2` true zeros labelled 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedCounts {
    pub e_r1: f64,
    pub e_r2: f64,
    pub e_edges: f64,
    pub e_mu_d: f64,
    pub e_mu_w: f64,
    /// `E(R_d − μ_d)` in factored form.
    pub rdc: f64,
    /// `E(R_w − μ_w)` in factored form.
    pub rwc: f64,
}

impl ExpectedCounts {
    /// `E R_d − E μ_d` computed term by term.
    pub fn rdc_unfactored(&self) -> f64 {
        self.e_r1 - self.e_r2 - self.e_mu_d
    }

    pub fn rwc_unfactored(&self, m: usize, n: usize, d1: usize, d2: usize) -> f64 {
        let (mx, nx) = (m - d1 + d2, n - d2 + d1);
        weighted_sum(self.e_r1, self.e_r2, mx, nx) - self.e_mu_w
    }
}

fn check_grid_point(m: usize, n: usize, d1: usize, d2: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::GroupTooSmall { ones: m, zeros: n, min: 2 });
    }
    if d1 > m || d2 > n {
        return Err(Error::InvalidParameter(format!("moved counts ({d1}, {d2}) exceed group sizes ({m}, {n})")));
    }
    Ok(())
}

pub fn expected_counts_sbm(p: &ConnectivityMatrix, m: usize, n: usize, d1: usize, d2: usize, directed: bool) -> Result<ExpectedCounts> {
    check_grid_point(m, n, d1, d2)?;
    if !directed && !p.is_symmetric() {
        return Err(Error::InvalidParameter("undirected expectations need p12 == p21".into()));
    }
    let (p11, p22, cross) = (p.p11(), p.p22(), p.p12() + p.p21());
    let (m, n, d1, d2) = (m as f64, n as f64, d1 as f64, d2 as f64);
    let big_n = m + n;
    // each unordered pair counts once when undirected
    let scale = if directed { 1.0 } else { 0.5 };

    let a1 = m - d1;
    let b2 = n - d2;
    let e_r1 = scale * (a1 * (a1 - 1.0) * p11 + a1 * d2 * cross + d2 * (d2 - 1.0) * p22);
    let e_r2 = scale * (b2 * (b2 - 1.0) * p22 + b2 * d1 * cross + d1 * (d1 - 1.0) * p11);
    let e_edges = scale * (m * (m - 1.0) * p11 + m * n * cross + n * (n - 1.0) * p22);
    let (mx, nx) = (m - d1 + d2, n - d2 + d1);
    let e_mu_d = (mx - nx) / big_n * e_edges;
    let e_mu_w = (mx - 1.0) * (nx - 1.0) / ((big_n - 1.0) * (big_n - 2.0)) * e_edges;

    let lead_d = 2.0 * (m - 1.0) * p11 - 2.0 * (n - 1.0) * p22 - (m - n) * cross;
    let rdc = scale * m * n / big_n * lead_d * (1.0 - d1 / m - d2 / n);
    let lead_w = p11 + p22 - cross;
    let shape_w = 1.0 + d1 * d1 / (m * (m - 1.0)) + d2 * d2 / (n * (n - 1.0))
        - (2.0 * m - 1.0) * d1 / (m * (m - 1.0))
        - (2.0 * n - 1.0) * d2 / (n * (n - 1.0))
        + 2.0 * d1 * d2 / (m * n);
    let rwc = scale * m * n * (m - 1.0) * (n - 1.0) / ((big_n - 1.0) * (big_n - 2.0)) * lead_w * shape_w;

    Ok(ExpectedCounts { e_r1, e_r2, e_edges, e_mu_d, e_mu_w, rdc, rwc })
}

/// `2(m−1)P₁₁ − 2(n−1)P₂₂ − (m−n)(P₁₂+P₂₁)`, the sign that orients `Z_d`.
pub fn difference_leading_factor(p: &ConnectivityMatrix, m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    2.0 * (m - 1.0) * p.p11() - 2.0 * (n - 1.0) * p.p22() - (m - n) * (p.p12() + p.p21())
}

/// `P₁₁ + P₂₂ − P₁₂ − P₂₁`, the sign that orients `Z_w`.
pub fn weighted_leading_factor(p: &ConnectivityMatrix) -> f64 {
    p.p11() + p.p22() - p.p12() - p.p21()
}

/// Population-level standardized signal over all `(Δ₁, Δ₂)` misplacements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub m: usize,
    pub n: usize,
    pub lead_d: f64,
    pub lead_w: f64,
    /// Cells attaining the maximum of the `Z_d` signal.
    pub zd_argmax: Vec<(usize, usize)>,
    /// Cells attaining the maximum of the `Z_w` signal when `lead_w > 0`,
    /// the minimum when `lead_w < 0`.
    pub zw_extremum: Vec<(usize, usize)>,
    /// `Z_d` signal is zero on every cell.
    pub zd_flat: bool,
    pub zw_flat: bool,
    pub zd_holds: bool,
    pub zw_holds: bool,
    /// `(Δ₁, Δ₂, zd signal, zw signal)`, cells with a group below two omitted.
    pub cells: Vec<(usize, usize, f64, f64)>,
}

impl GridReport {
    pub fn holds(&self) -> bool {
        self.zd_holds && self.zw_holds
    }
}

fn extremum_cells(cells: &[(usize, usize, f64, f64)], pick: impl Fn(&(usize, usize, f64, f64)) -> f64, maximize: bool) -> Vec<(usize, usize)> {
    let sign = if maximize { 1.0 } else { -1.0 };
    let best = cells.iter().map(|c| sign * pick(c)).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1e-300);
    cells.iter().filter(|c| sign * pick(c) >= best - tol).map(|c| (c.0, c.1)).collect()
}

/// Evaluates expected signal over standard deviation on the whole grid and
/// checks that the extremum sits at the true labelling or its complement.
///
/// Only the group-size factors of the null standard deviations are used
/// (`√(m_x n_x)` and `√(m_x n_x (m_x−1)(n_x−1))`); the graph-dependent part is
/// a positive constant and cannot move the extremum.
pub fn verify_extremum_grid(p: &ConnectivityMatrix, m: usize, n: usize) -> Result<GridReport> {
    if m > GRID_MAX_GROUP || n > GRID_MAX_GROUP {
        return Err(Error::InvalidParameter(format!("grid is limited to groups of {GRID_MAX_GROUP}")));
    }
    check_grid_point(m, n, 0, 0)?;
    let mut cells = Vec::with_capacity((m + 1) * (n + 1));
    for d1 in 0..=m {
        for d2 in 0..=n {
            let (mx, nx) = ((m - d1 + d2) as f64, (n - d2 + d1) as f64);
            if mx < 2.0 || nx < 2.0 {
                continue;
            }
            let e = expected_counts_sbm(p, m, n, d1, d2, true)?;
            let zd = e.rdc / (mx * nx).sqrt();
            let zw = e.rwc / (mx * nx * (mx - 1.0) * (nx - 1.0)).sqrt();
            cells.push((d1, d2, zd, zw));
        }
    }
    let lead_d = difference_leading_factor(p, m, n);
    let lead_w = weighted_leading_factor(p);
    let ends = [(0, 0), (m, n)];

    let zd_flat = cells.iter().all(|c| c.2 == 0.0);
    let zd_argmax = extremum_cells(&cells, |c| c.2, true);
    let zd_holds = if lead_d > 0.0 {
        zd_argmax == [(0, 0)]
    } else if lead_d < 0.0 {
        zd_argmax == [(m, n)]
    } else {
        zd_flat
    };

    let zw_flat = cells.iter().all(|c| c.3 == 0.0);
    let zw_extremum = extremum_cells(&cells, |c| c.3, lead_w >= 0.0);
    let zw_holds = if lead_w == 0.0 {
        zw_flat
    } else {
        !zw_extremum.is_empty() && zw_extremum.iter().all(|c| ends.contains(c))
    };

    Ok(GridReport { m, n, lead_d, lead_w, zd_argmax, zw_extremum, zd_flat, zw_flat, zd_holds, zw_holds, cells })
}
