//! Within-group edge counts, their permutation-null moments, and the
//! standardized statistics built from them.
//!
//! Under the permutation null the labels are a uniformly random arrangement
//! of `m_x` ones and `n_x` zeros on a fixed graph. The means and variances of
//! `R_w` and `R_d` then depend on the graph only through [`GraphConstants`].

use serde::Serialize;

use crate::graph::{Graph, GraphConstants, MIN_NODES};
use crate::{Error, Result};

/// Smallest group size the standardized statistics accept.
pub const MIN_GROUP: usize = 2;

/// A binary labelling of the nodes. Label 1 is "group 1", label 0 "group 0".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    labels: Vec<u8>,
    ones: usize,
}

impl Partition {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
        }
        let ones = labels.iter().filter(|&&l| l == 1).count();
        Ok(Partition { labels, ones })
    }

    pub fn from_bools(labels: impl IntoIterator<Item = bool>) -> Self {
        let labels: Vec<u8> = labels.into_iter().map(u8::from).collect();
        let ones = labels.iter().filter(|&&l| l == 1).count();
        Partition { labels, ones }
    }

    /// `ones` nodes labelled 1 followed by `zeros` nodes labelled 0.
    pub fn blocks(ones: usize, zeros: usize) -> Self {
        let mut labels = vec![1u8; ones];
        labels.resize(ones + zeros, 0);
        Partition { labels, ones }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u8> {
        self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    /// `m_x`, the size of group 1.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// `n_x`, the size of group 0.
    pub fn zeros(&self) -> usize {
        self.labels.len() - self.ones
    }

    pub fn complement(&self) -> Self {
        Partition { labels: self.labels.iter().map(|&l| 1 - l).collect(), ones: self.zeros() }
    }

    pub fn flip(&mut self, i: usize) {
        if self.labels[i] == 1 {
            self.ones -= 1;
        } else {
            self.ones += 1;
        }
        self.labels[i] ^= 1;
    }

    /// The labelling seen after relabelling node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut labels = vec![0u8; self.labels.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            labels[perm[i]] = l;
        }
        Partition { labels, ones: self.ones }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: self.labels.len() });
        }
        Ok(())
    }
}

/// Edge counts inside group 1 (`r1`) and group 0 (`r2`).
pub fn within_counts(g: &Graph, x: &Partition) -> Result<(u64, u64)> {
    x.check_len(g.node_count())?;
    let mut r1 = 0;
    let mut r2 = 0;
    for &(u, v) in g.edges() {
        match (x.label(u), x.label(v)) {
            (1, 1) => r1 += 1,
            (0, 0) => r2 += 1,
            _ => {}
        }
    }
    Ok((r1, r2))
}

/// `R_w = ((n_x - 1) R1 + (m_x - 1) R2) / (N - 2)`.
pub fn weighted_sum(r1: f64, r2: f64, ones: usize, zeros: usize) -> f64 {
    let n = (ones + zeros) as f64;
    ((zeros as f64 - 1.0) * r1 + (ones as f64 - 1.0) * r2) / (n - 2.0)
}

pub fn r_w(g: &Graph, x: &Partition) -> Result<f64> {
    if g.node_count() < 3 {
        return Err(Error::GraphTooSmall { nodes: g.node_count(), min: 3 });
    }
    let (r1, r2) = within_counts(g, x)?;
    Ok(weighted_sum(r1 as f64, r2 as f64, x.ones(), x.zeros()))
}

pub fn r_d(g: &Graph, x: &Partition) -> Result<f64> {
    let (r1, r2) = within_counts(g, x)?;
    Ok(r1 as f64 - r2 as f64)
}

/// Permutation-null mean and standard deviation of `R_w` and `R_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub mu_w: f64,
    pub sigma_w: f64,
    pub mu_d: f64,
    pub sigma_d: f64,
    pub degenerate_w: bool,
    pub degenerate_d: bool,
}

impl MomentSet {
    pub fn var_w(&self) -> f64 {
        self.sigma_w * self.sigma_w
    }

    pub fn var_d(&self) -> f64 {
        self.sigma_d * self.sigma_d
    }

    /// Closed-form moments for any sizes with `N >= 4`; group sizes below 2
    /// simply come out degenerate for the `w` pair.
    pub(crate) fn compute(c: &GraphConstants, ones: usize, zeros: usize) -> Self {
        let big_n = (ones + zeros) as f64;
        let (m, n) = (ones as f64, zeros as f64);
        let g = c.g_size as f64;
        let q1 = c.q1 as f64;
        let q2 = c.q2 as f64;
        let floor = 1e-12 * (g * g + 1.0);

        let mu_w = (m - 1.0) * (n - 1.0) / ((big_n - 1.0) * (big_n - 2.0)) * g;
        let var_w = m * n * (m - 1.0) * (n - 1.0) / (big_n * (big_n - 1.0) * (big_n - 2.0).powi(2))
            * (g + q1 - g * g / (big_n - 1.0) + q2 / (big_n - 3.0));
        let mu_d = (m - n) / big_n * g;
        let var_d = m * n / (big_n * (big_n - 1.0)) * (g + q1 + g * g * (big_n - 4.0) / big_n - q2);

        let degenerate_w = !(var_w >= floor);
        let degenerate_d = !(var_d >= floor);
        MomentSet {
            mu_w,
            sigma_w: if degenerate_w { 0.0 } else { var_w.sqrt() },
            mu_d,
            sigma_d: if degenerate_d { 0.0 } else { var_d.sqrt() },
            degenerate_w,
            degenerate_d,
        }
    }
}

/// Closed-form null moments for group sizes `(m_x, n_x)`.
///
/// Variances under `1e-12 * (|G|^2 + 1)` are clamped to zero and flagged.
pub fn perm_null_moments(c: &GraphConstants, ones: usize, zeros: usize) -> Result<MomentSet> {
    if ones + zeros != c.nodes {
        return Err(Error::LengthMismatch { expected: c.nodes, actual: ones + zeros });
    }
    if c.nodes < MIN_NODES {
        return Err(Error::GraphTooSmall { nodes: c.nodes, min: MIN_NODES });
    }
    if ones < MIN_GROUP || zeros < MIN_GROUP {
        return Err(Error::GroupTooSmall { ones, zeros, min: MIN_GROUP });
    }
    Ok(MomentSet::compute(c, ones, zeros))
}

/// `(Z_w, Z_d)` from raw counts; a degenerate variance yields 0.
pub fn standardize(r1: f64, r2: f64, ones: usize, zeros: usize, mom: &MomentSet) -> (f64, f64) {
    let zw = if mom.degenerate_w {
        0.0
    } else {
        (weighted_sum(r1, r2, ones, zeros) - mom.mu_w) / mom.sigma_w
    };
    let zd = if mom.degenerate_d { 0.0 } else { (r1 - r2 - mom.mu_d) / mom.sigma_d };
    (zw, zd)
}

/// Everything computed for one labelling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeStats {
    pub r1: u64,
    pub r2: u64,
    pub r_w: f64,
    pub r_d: f64,
    pub moments: MomentSet,
    pub z_w: f64,
    pub z_d: f64,
}

pub fn edge_stats(g: &Graph, c: &GraphConstants, x: &Partition) -> Result<EdgeStats> {
    let (r1, r2) = within_counts(g, x)?;
    let moments = perm_null_moments(c, x.ones(), x.zeros())?;
    let (z_w, z_d) = standardize(r1 as f64, r2 as f64, x.ones(), x.zeros(), &moments);
    Ok(EdgeStats {
        r1,
        r2,
        r_w: weighted_sum(r1 as f64, r2 as f64, x.ones(), x.zeros()),
        r_d: r1 as f64 - r2 as f64,
        moments,
        z_w,
        z_d,
    })
}

pub fn z_w(g: &Graph, c: &GraphConstants, x: &Partition) -> Result<f64> {
    Ok(edge_stats(g, c, x)?.z_w)
}

pub fn z_d(g: &Graph, c: &GraphConstants, x: &Partition) -> Result<f64> {
    Ok(edge_stats(g, c, x)?.z_d)
}

/// Degree mass per group, as consumed by the modularity objectives.
///
/// Undirected graphs are treated as symmetric directed graphs: every edge is
/// counted in both directions, so `out` and `in` coincide and the total is `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DegreeMass {
    pub out1: f64,
    pub in1: f64,
    pub total: f64,
}

impl DegreeMass {
    pub fn of(g: &Graph, x: &Partition) -> Self {
        let mut mass = DegreeMass { total: Self::total(g), ..Default::default() };
        for i in (0..g.node_count()).filter(|&i| x.label(i) == 1) {
            mass.out1 += g.out_degree(i) as f64;
            mass.in1 += g.in_degree(i) as f64;
        }
        mass
    }

    pub fn total(g: &Graph) -> f64 {
        let e = g.edge_count() as f64;
        if g.is_directed() {
            e
        } else {
            2.0 * e
        }
    }

    /// Modularity and its signed variant from counts and degree mass.
    pub fn modularity(&self, directed: bool, r1: f64, r2: f64) -> (f64, f64) {
        let scale = if directed { 1.0 } else { 2.0 };
        let (out0, in0) = (self.total - self.out1, self.total - self.in1);
        let q = scale * (r1 + r2) - (self.out1 * self.in1 + out0 * in0) / self.total;
        let qd = scale * (r1 - r2) - (self.out1 * self.in1 - out0 * in0) / self.total;
        (q, qd)
    }
}

/// Unnormalized modularity `Σ_ij (A_ij - k_i k_j / 2m) [x_i = x_j]`.
///
/// Directed graphs use `k_i^out k_j^in / |G|` as the expected count.
pub fn modularity_q(g: &Graph, x: &Partition) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (r1, r2) = within_counts(g, x)?;
    Ok(DegreeMass::of(g, x).modularity(g.is_directed(), r1 as f64, r2 as f64).0)
}

/// Signed modularity: group-1 pairs count `+1`, group-0 pairs `-1`, cross pairs 0.
pub fn q_d(g: &Graph, x: &Partition) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (r1, r2) = within_counts(g, x)?;
    Ok(DegreeMass::of(g, x).modularity(g.is_directed(), r1 as f64, r2 as f64).1)
}

/// Incidences of node `i` with group-1 and group-0 nodes, counting both edge
/// directions for directed graphs.
pub(crate) fn incidences(g: &Graph, labels: &[u8], i: usize) -> (i64, i64) {
    let mut to_one = 0;
    let mut total = 0;
    let mut tally = |j: usize| {
        total += 1;
        to_one += labels[j] as i64;
    };
    g.out_neighbors(i).iter().for_each(|&j| tally(j));
    if g.is_directed() {
        g.in_neighbors(i).iter().for_each(|&j| tally(j));
    }
    (to_one, total - to_one)
}

/// Change in `(R1, R2)` if node `i` switched groups.
pub fn flip_delta(g: &Graph, x: &Partition, i: usize) -> Result<(i64, i64)> {
    x.check_len(g.node_count())?;
    if i >= g.node_count() {
        return Err(Error::NodeOutOfRange { index: i, nodes: g.node_count() });
    }
    let (to_one, to_zero) = incidences(g, x.labels(), i);
    Ok(if x.label(i) == 1 { (-to_one, to_zero) } else { (to_one, -to_zero) })
}
