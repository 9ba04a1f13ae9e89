//! Planted two-block graphs: the stochastic block model and its
//! degree-corrected extension.
//!
//! Randomness comes from [`ChaCha8Rng`], which is portable and reproducible
//! across platforms. Replicate `r` of a sweep with seed `s` draws from
//! [`replicate_rng`]`(s, r)`: the ChaCha key derived from `s` with stream `r`,
//! so replicates never share a keystream.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto, Uniform};
use serde::Serialize;

use crate::edgestats::{Partition, MIN_GROUP};
use crate::graph::Graph;
use crate::{Error, Result};

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// 2x2 block connectivity. Index 0 is the block of label-1 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectivityMatrix {
    pub p: [[f64; 2]; 2],
}

impl ConnectivityMatrix {
    pub fn new(p11: f64, p12: f64, p21: f64, p22: f64) -> Result<Self> {
        for (name, v) in [("p11", p11), ("p12", p12), ("p21", p21), ("p22", p22)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(ConnectivityMatrix { p: [[p11, p12], [p21, p22]] })
    }

    pub fn symmetric(p11: f64, p12: f64, p22: f64) -> Result<Self> {
        Self::new(p11, p12, p12, p22)
    }

    pub fn p11(&self) -> f64 {
        self.p[0][0]
    }
    pub fn p12(&self) -> f64 {
        self.p[0][1]
    }
    pub fn p21(&self) -> f64 {
        self.p[1][0]
    }
    pub fn p22(&self) -> f64 {
        self.p[1][1]
    }

    pub fn max(&self) -> f64 {
        self.p.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.p12() == self.p21()
    }

    /// Probability for an edge between labels `a` and `b` (1 or 0).
    pub fn between(&self, a: u8, b: u8) -> f64 {
        self.p[1 - a as usize][1 - b as usize]
    }
}

/// Law of the degree parameters; every kind has mean exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ThetaSpec {
    Constant1,
    /// Pareto with shape `alpha > 1` and scale `(alpha - 1) / alpha`.
    Pareto(f64),
    /// Uniform on `[low, 2 - low]`, `low` in `(0, 1]`.
    UniformLow(f64),
    /// `Exp(rate) + 1 - 1/rate`, `rate > 1` so draws stay positive.
    ShiftedExponential(f64),
}

impl ThetaSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ThetaSpec::Constant1 => true,
            ThetaSpec::Pareto(a) => a > 1.0 && a.is_finite(),
            ThetaSpec::UniformLow(a) => a > 0.0 && a <= 1.0,
            ThetaSpec::ShiftedExponential(r) => r > 1.0 && r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("theta law {self} is outside its domain")))
        }
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Constant1 => write!(f, "const"),
            ThetaSpec::Pareto(a) => write!(f, "pareto:{a}"),
            ThetaSpec::UniformLow(a) => write!(f, "uniform:{a}"),
            ThetaSpec::ShiftedExponential(r) => write!(f, "exp:{r}"),
        }
    }
}

impl FromStr for ThetaSpec {
    type Err = Error;

    /// `const`, `pareto:SHAPE`, `uniform:LOW` or `exp:RATE`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse theta law `{s}`"));
        let spec = match s.split_once(':') {
            None if s == "const" => ThetaSpec::Constant1,
            None => return Err(bad()),
            Some((kind, value)) => {
                let v: f64 = value.parse().map_err(|_| bad())?;
                match kind {
                    "pareto" => ThetaSpec::Pareto(v),
                    "uniform" => ThetaSpec::UniformLow(v),
                    "exp" => ThetaSpec::ShiftedExponential(v),
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn sample_theta<R: Rng>(spec: ThetaSpec, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let draws = match spec {
        ThetaSpec::Constant1 | ThetaSpec::UniformLow(1.0) => vec![1.0; count],
        ThetaSpec::Pareto(shape) => {
            let d = Pareto::new((shape - 1.0) / shape, shape).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            d.sample_iter(rng).take(count).collect()
        }
        ThetaSpec::UniformLow(low) => {
            let d = Uniform::new_inclusive(low, 2.0 - low).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            d.sample_iter(rng).take(count).collect()
        }
        ThetaSpec::ShiftedExponential(rate) => {
            let d = Exp::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let shift = 1.0 - 1.0 / rate;
            d.sample_iter(rng).take(count).map(|t| t + shift).collect()
        }
    };
    Ok(draws)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedGraph {
    #[serde(skip)]
    pub graph: Graph,
    /// The first `m` nodes carry label 1, the remaining `n` label 0.
    pub truth: Partition,
    pub thetas: Vec<f64>,
    /// Pairs whose degree-corrected probability exceeded 1 and was capped.
    pub clamped_pairs: usize,
    pub total_pairs: usize,
}

impl PlantedGraph {
    /// The same draw with nodes relabelled by a uniform random permutation.
    pub fn shuffled<R: Rng>(&self, rng: &mut R) -> Result<PlantedGraph> {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..self.graph.node_count()).collect();
        perm.shuffle(rng);
        let mut thetas = vec![0.0; perm.len()];
        for (i, &t) in self.thetas.iter().enumerate() {
            thetas[perm[i]] = t;
        }
        Ok(PlantedGraph {
            graph: self.graph.permuted(&perm)?,
            truth: self.truth.permuted(&perm),
            thetas,
            clamped_pairs: self.clamped_pairs,
            total_pairs: self.total_pairs,
        })
    }
}

fn check_sizes(p: &ConnectivityMatrix, m: usize, n: usize, directed: bool) -> Result<()> {
    if m < MIN_GROUP || n < MIN_GROUP {
        return Err(Error::GroupTooSmall { ones: m, zeros: n, min: MIN_GROUP });
    }
    if !directed && !p.is_symmetric() {
        return Err(Error::InvalidParameter("undirected sampling needs p12 == p21".into()));
    }
    Ok(())
}

pub fn sample_sbm<R: Rng>(p: &ConnectivityMatrix, m: usize, n: usize, directed: bool, rng: &mut R) -> Result<PlantedGraph> {
    sample_dcsbm(p, m, n, ThetaSpec::Constant1, directed, rng)
}

/// Each admissible pair gets an edge with probability `min(1, θ_i θ_j P_ab)`.
pub fn sample_dcsbm<R: Rng>(
    p: &ConnectivityMatrix,
    m: usize,
    n: usize,
    spec: ThetaSpec,
    directed: bool,
    rng: &mut R,
) -> Result<PlantedGraph> {
    check_sizes(p, m, n, directed)?;
    let thetas = sample_theta(spec, m + n, rng)?;
    sample_with_thetas(p, m, n, thetas, directed, rng)
}

/// Degree-corrected sampling with caller-supplied degree parameters.
pub fn sample_with_thetas<R: Rng>(
    p: &ConnectivityMatrix,
    m: usize,
    n: usize,
    thetas: Vec<f64>,
    directed: bool,
    rng: &mut R,
) -> Result<PlantedGraph> {
    check_sizes(p, m, n, directed)?;
    let total = m + n;
    if thetas.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: thetas.len() });
    }
    if thetas.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter("degree parameters must be positive".into()));
    }
    let truth = Partition::blocks(m, n);
    let mut edges = Vec::new();
    let mut clamped_pairs = 0;
    let mut total_pairs = 0;
    for i in 0..total {
        let js = if directed { 0..total } else { i + 1..total };
        for j in js.filter(|&j| j != i) {
            let raw = thetas[i] * thetas[j] * p.between(truth.label(i), truth.label(j));
            total_pairs += 1;
            if raw > 1.0 {
                clamped_pairs += 1;
            }
            if rng.random::<f64>() < raw.min(1.0) {
                edges.push((i, j));
            }
        }
    }
    Ok(PlantedGraph { graph: Graph::new(total, directed, edges)?, truth, thetas, clamped_pairs, total_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_density(pg: &PlantedGraph, a: u8, b: u8) -> f64 {
        let t = &pg.truth;
        let g = &pg.graph;
        let count = g
            .edges()
            .iter()
            .filter(|&&(u, v)| {
                let (lu, lv) = (t.label(u), t.label(v));
                (lu, lv) == (a, b) || (!g.is_directed() && (lv, lu) == (a, b))
            })
            .count() as f64;
        let size = |l: u8| if l == 1 { t.ones() } else { t.zeros() } as f64;
        let pairs = if a == b {
            let s = size(a);
            if g.is_directed() {
                s * (s - 1.0)
            } else {
                s * (s - 1.0) / 2.0
            }
        } else {
            size(a) * size(b)
        };
        count / pairs
    }

    #[test]
    fn theta_examples() {
        let mut rng = replicate_rng(1, 0);
        assert_eq!(sample_theta(ThetaSpec::Constant1, 5, &mut rng).unwrap(), vec![1.0; 5]);
        assert_eq!(sample_theta(ThetaSpec::UniformLow(1.0), 4, &mut rng).unwrap(), vec![1.0; 4]);
        for spec in [ThetaSpec::Pareto(3.0), ThetaSpec::UniformLow(0.2), ThetaSpec::ShiftedExponential(2.0)] {
            let draws = sample_theta(spec, 100_000, &mut rng).unwrap();
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            assert!((mean - 1.0).abs() < 0.02, "{spec}: {mean}");
            assert!(draws.iter().all(|&t| t > 0.0));
        }
        let pareto = sample_theta(ThetaSpec::Pareto(3.0), 1000, &mut rng).unwrap();
        assert!(pareto.iter().all(|&t| t >= 2.0 / 3.0));
    }

    #[test]
    fn theta_domains() {
        for bad in [ThetaSpec::Pareto(1.0), ThetaSpec::UniformLow(0.0), ThetaSpec::UniformLow(1.5), ThetaSpec::ShiftedExponential(1.0)] {
            assert!(bad.validate().is_err(), "{bad}");
        }
        assert_eq!("pareto:3".parse::<ThetaSpec>().unwrap(), ThetaSpec::Pareto(3.0));
        assert_eq!("const".parse::<ThetaSpec>().unwrap(), ThetaSpec::Constant1);
        assert_eq!("exp:2.5".parse::<ThetaSpec>().unwrap(), ThetaSpec::ShiftedExponential(2.5));
        assert!("uniform:0".parse::<ThetaSpec>().is_err());
        assert!("gamma:2".parse::<ThetaSpec>().is_err());
    }

    #[test]
    fn degenerate_matrices() {
        let mut rng = replicate_rng(2, 0);
        let zero = ConnectivityMatrix::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(sample_sbm(&zero, 3, 4, true, &mut rng).unwrap().graph.edge_count(), 0);
        assert_eq!(sample_dcsbm(&zero, 3, 4, ThetaSpec::Pareto(2.0), false, &mut rng).unwrap().graph.edge_count(), 0);
        let one = ConnectivityMatrix::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let k6 = sample_sbm(&one, 3, 3, false, &mut rng).unwrap();
        assert_eq!(k6.graph.edge_count(), 15);
        assert_eq!(k6.truth.labels(), &[1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn parameter_errors() {
        let mut rng = replicate_rng(3, 0);
        assert!(ConnectivityMatrix::new(1.2, 0.0, 0.0, 0.0).is_err());
        let asym = ConnectivityMatrix::new(0.5, 0.1, 0.3, 0.5).unwrap();
        assert!(sample_sbm(&asym, 5, 5, false, &mut rng).is_err());
        assert!(sample_sbm(&asym, 5, 5, true, &mut rng).is_ok());
        assert!(sample_sbm(&asym, 1, 5, true, &mut rng).is_err());
    }

    #[test]
    fn constant_theta_matches_sbm() {
        let p = ConnectivityMatrix::symmetric(0.5, 0.3, 0.5).unwrap();
        let a = sample_sbm(&p, 10, 12, false, &mut replicate_rng(9, 4)).unwrap();
        let b = sample_dcsbm(&p, 10, 12, ThetaSpec::Constant1, false, &mut replicate_rng(9, 4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.graph, b.graph);
    }

    #[test]
    fn seeded_determinism() {
        let p = ConnectivityMatrix::new(0.4, 0.1, 0.2, 0.3).unwrap();
        let a = sample_dcsbm(&p, 8, 9, ThetaSpec::Pareto(3.0), true, &mut replicate_rng(5, 1)).unwrap();
        let b = sample_dcsbm(&p, 8, 9, ThetaSpec::Pareto(3.0), true, &mut replicate_rng(5, 1)).unwrap();
        let c = sample_dcsbm(&p, 8, 9, ThetaSpec::Pareto(3.0), true, &mut replicate_rng(5, 2)).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.thetas, b.thetas);
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn block_densities_converge() {
        let p = ConnectivityMatrix::symmetric(0.5, 0.3, 0.5).unwrap();
        let reps = 200;
        let mut sums = [0.0; 3];
        for r in 0..reps {
            let pg = sample_sbm(&p, 50, 50, false, &mut replicate_rng(11, r)).unwrap();
            sums[0] += block_density(&pg, 1, 1);
            sums[1] += block_density(&pg, 1, 0);
            sums[2] += block_density(&pg, 0, 0);
        }
        let within_pairs = 50.0 * 49.0 / 2.0 * reps as f64;
        let cross_pairs = 2500.0 * reps as f64;
        for (k, (target, pairs)) in [(0.5, within_pairs), (0.3, cross_pairs), (0.5, within_pairs)].into_iter().enumerate() {
            let mean = sums[k] / reps as f64;
            let se = (target * (1.0 - target) / pairs).sqrt();
            assert!((mean - target).abs() < 3.0 * se, "block {k}: {mean}");
        }
        assert!((sums[0] / reps as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn directed_densities_converge() {
        let p = ConnectivityMatrix::new(0.4, 0.1, 0.25, 0.2).unwrap();
        let reps = 100;
        let mut sums = [[0.0; 2]; 2];
        for r in 0..reps {
            let pg = sample_sbm(&p, 30, 40, true, &mut replicate_rng(12, r)).unwrap();
            for (a, la) in [(0, 1u8), (1, 0u8)] {
                for (b, lb) in [(0, 1u8), (1, 0u8)] {
                    sums[a][b] += block_density(&pg, la, lb);
                }
            }
        }
        let sizes = [30.0, 40.0];
        for a in 0..2 {
            for b in 0..2 {
                let pairs = if a == b { sizes[a] * (sizes[a] - 1.0) } else { sizes[a] * sizes[b] } * reps as f64;
                let target = p.p[a][b];
                let se = (target * (1.0 - target) / pairs).sqrt();
                assert!((sums[a][b] / reps as f64 - target).abs() < 3.0 * se);
            }
        }
    }

    #[test]
    fn pareto_ten_rarely_clamps() {
        let p = ConnectivityMatrix::symmetric(0.5, 0.3, 0.5).unwrap();
        let (mut clamped, mut total) = (0, 0);
        for r in 0..100 {
            let pg = sample_dcsbm(&p, 50, 50, ThetaSpec::Pareto(10.0), false, &mut replicate_rng(13, r)).unwrap();
            clamped += pg.clamped_pairs;
            total += pg.total_pairs;
        }
        assert!((clamped as f64) < 0.01 * total as f64, "{clamped}/{total}");
    }

    #[test]
    fn expected_degree_tracks_theta() {
        // small P keeps min(1, .) inactive, so E[k_i] = θ_i Σ_{j≠i} θ_j P
        let p = ConnectivityMatrix::symmetric(0.02, 0.02, 0.02).unwrap();
        let n = 200;
        let mut rng = replicate_rng(14, 0);
        let thetas = sample_theta(ThetaSpec::UniformLow(0.2), n, &mut rng).unwrap();
        let reps = 400;
        let mut degree = vec![0.0; n];
        for r in 0..reps {
            let pg = sample_with_thetas(&p, n / 2, n / 2, thetas.clone(), false, &mut replicate_rng(15, r)).unwrap();
            assert_eq!(pg.clamped_pairs, 0);
            let g = &pg.graph;
            for (i, d) in degree.iter_mut().enumerate() {
                *d += g.degree(i) as f64 / reps as f64;
            }
        }
        let total: f64 = thetas.iter().sum();
        let ratio: f64 = (0..n).map(|i| degree[i] / (thetas[i] * (total - thetas[i]) * 0.02)).sum::<f64>() / n as f64;
        assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
    }

    #[test]
    fn shuffle_keeps_structure() {
        let p = ConnectivityMatrix::symmetric(0.6, 0.1, 0.4).unwrap();
        let pg = sample_sbm(&p, 6, 7, false, &mut replicate_rng(16, 0)).unwrap();
        let sh = pg.shuffled(&mut replicate_rng(17, 0)).unwrap();
        assert_eq!(sh.graph.edge_count(), pg.graph.edge_count());
        assert_eq!(sh.truth.ones(), 6);
        assert_eq!(block_density(&sh, 1, 1), block_density(&pg, 1, 1));
        assert_eq!(block_density(&sh, 0, 1), block_density(&pg, 0, 1));
    }
}
