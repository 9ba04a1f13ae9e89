//! Multi-restart greedy single-flip search over two-group labellings.
//!
//! Each restart starts from a random labelling and repeatedly flips the one
//! node whose move raises the objective the most, until no flip helps. A flip
//! is scored in O(1) from per-node incidence counts; applying it costs
//! O(deg i) to refresh the neighbours' counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edgestats::{incidences, standardize, DegreeMass, MomentSet, Partition, MIN_GROUP};
use crate::graph::{Graph, GraphConstants};
use crate::{Error, Result};

/// A flip is accepted only if it improves the objective by more than this.
pub const IMPROVEMENT_EPS: f64 = 1e-12;

/// The largest graph [`exhaustive_fit`] will enumerate.
pub const EXHAUSTIVE_MAX_NODES: usize = 16;

/// Statistic plus search direction. Every kind is maximized internally;
/// `ZwMin` maximizes `-Z_w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    ZwMax,
    ZwMin,
    ZdMax,
    QMax,
    QdMax,
}

impl Objective {
    pub const ALL: [Objective; 5] = [Objective::ZwMax, Objective::ZwMin, Objective::ZdMax, Objective::QMax, Objective::QdMax];

    pub fn name(self) -> &'static str {
        match self {
            Objective::ZwMax => "zw-max",
            Objective::ZwMin => "zw-min",
            Objective::ZdMax => "zd",
            Objective::QMax => "modularity",
            Objective::QdMax => "qd",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }

    /// Maps an internal (maximized) score back to the statistic's own sign.
    pub fn statistic(self, score: f64) -> f64 {
        match self {
            Objective::ZwMin => -score,
            _ => score,
        }
    }

    /// Internal score of `x` computed from scratch, with its degeneracy flag.
    pub fn evaluate(self, g: &Graph, c: &GraphConstants, x: &Partition) -> Result<(f64, bool)> {
        if x.len() != g.node_count() {
            return Err(Error::LengthMismatch { expected: g.node_count(), actual: x.len() });
        }
        let ctx = Context::new(g, c);
        Ok(self.score(&ctx, &Summary::of(g, x)))
    }

    fn score(self, ctx: &Context, s: &Summary) -> (f64, bool) {
        let zeros = ctx.nodes - s.ones;
        match self {
            Objective::ZwMax | Objective::ZwMin | Objective::ZdMax => {
                let mom = MomentSet::compute(&ctx.constants, s.ones, zeros);
                let (zw, zd) = standardize(s.r1 as f64, s.r2 as f64, s.ones, zeros, &mom);
                match self {
                    Objective::ZwMax => (zw, mom.degenerate_w),
                    Objective::ZwMin => (-zw, mom.degenerate_w),
                    _ => (zd, mom.degenerate_d),
                }
            }
            Objective::QMax | Objective::QdMax => {
                if ctx.total_mass == 0.0 {
                    return (0.0, true);
                }
                let mass = DegreeMass { out1: s.out1, in1: s.in1, total: ctx.total_mass };
                let (q, qd) = mass.modularity(ctx.constants.directed, s.r1 as f64, s.r2 as f64);
                (if self == Objective::QMax { q } else { qd }, false)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Context {
    constants: GraphConstants,
    nodes: usize,
    total_mass: f64,
}

impl Context {
    fn new(g: &Graph, c: &GraphConstants) -> Self {
        Context { constants: *c, nodes: g.node_count(), total_mass: DegreeMass::total(g) }
    }
}

/// The label-dependent quantities every objective is a function of.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Summary {
    r1: i64,
    r2: i64,
    ones: usize,
    out1: f64,
    in1: f64,
}

impl Summary {
    fn of(g: &Graph, x: &Partition) -> Self {
        let mut r1 = 0;
        let mut r2 = 0;
        for &(u, v) in g.edges() {
            match (x.label(u), x.label(v)) {
                (1, 1) => r1 += 1,
                (0, 0) => r2 += 1,
                _ => {}
            }
        }
        let mass = DegreeMass::of(g, x);
        Summary { r1, r2, ones: x.ones(), out1: mass.out1, in1: mass.in1 }
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub restarts: usize,
    pub seed: u64,
    pub min_group: usize,
    /// Used as the starting point of restart 0 when present.
    pub warm_start: Option<Partition>,
    /// Per-restart cap on accepted flips; `None` means `N^2`.
    pub max_iters: Option<usize>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { restarts: 20, seed: 0, min_group: MIN_GROUP, warm_start: None, max_iters: None }
    }
}

impl FitConfig {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        FitConfig { restarts, seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub objective: Objective,
    pub labels: Partition,
    /// Internal (maximized) score at `labels`.
    pub value: f64,
    pub restart_values: Vec<f64>,
    /// Total accepted flips across restarts.
    pub iterations: usize,
    /// The best state found has a zero null variance (or an empty graph).
    pub degenerate: bool,
}

impl FitResult {
    /// The statistic at `labels` with its natural sign (`Z_w` for `ZwMin`).
    pub fn statistic(&self) -> f64 {
        self.objective.statistic(self.value)
    }
}

/// One greedy trajectory, exposed so callers can step or inspect it.
#[derive(Debug, Clone)]
pub struct Climber<'g> {
    g: &'g Graph,
    ctx: Context,
    objective: Objective,
    min_group: usize,
    x: Partition,
    to_one: Vec<i64>,
    to_zero: Vec<i64>,
    summary: Summary,
    value: f64,
    degenerate: bool,
    flips: usize,
}

impl<'g> Climber<'g> {
    pub fn new(g: &'g Graph, c: &GraphConstants, objective: Objective, start: Partition, min_group: usize) -> Result<Self> {
        if start.len() != g.node_count() {
            return Err(Error::LengthMismatch { expected: g.node_count(), actual: start.len() });
        }
        if start.ones() < min_group || start.zeros() < min_group {
            return Err(Error::GroupTooSmall { ones: start.ones(), zeros: start.zeros(), min: min_group });
        }
        let ctx = Context::new(g, c);
        let (to_one, to_zero) = (0..g.node_count()).map(|i| incidences(g, start.labels(), i)).unzip();
        let summary = Summary::of(g, &start);
        let (value, degenerate) = objective.score(&ctx, &summary);
        Ok(Climber { g, ctx, objective, min_group, x: start, to_one, to_zero, summary, value, degenerate, flips: 0 })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn partition(&self) -> &Partition {
        &self.x
    }

    pub fn flips(&self) -> usize {
        self.flips
    }

    fn after_flip(&self, i: usize) -> Summary {
        let s = &self.summary;
        let kout = self.g.out_degree(i) as f64;
        let kin = self.g.in_degree(i) as f64;
        if self.x.label(i) == 1 {
            Summary {
                r1: s.r1 - self.to_one[i],
                r2: s.r2 + self.to_zero[i],
                ones: s.ones - 1,
                out1: s.out1 - kout,
                in1: s.in1 - kin,
            }
        } else {
            Summary {
                r1: s.r1 + self.to_one[i],
                r2: s.r2 - self.to_zero[i],
                ones: s.ones + 1,
                out1: s.out1 + kout,
                in1: s.in1 + kin,
            }
        }
    }

    fn can_flip(&self, i: usize) -> bool {
        if self.x.label(i) == 1 {
            self.x.ones() > self.min_group
        } else {
            self.x.zeros() > self.min_group
        }
    }

    /// Best strictly improving flip; ties go to the lowest node index.
    pub fn best_move(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..self.g.node_count()).filter(|&i| self.can_flip(i)) {
            let (v, _) = self.objective.score(&self.ctx, &self.after_flip(i));
            if v > self.value + IMPROVEMENT_EPS && best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best
    }

    /// Applies the best improving flip, returning the flipped node.
    pub fn step(&mut self) -> Option<usize> {
        let (i, _) = self.best_move()?;
        self.apply(i);
        Some(i)
    }

    fn apply(&mut self, i: usize) {
        self.summary = self.after_flip(i);
        let joining_one = self.x.label(i) == 0;
        self.x.flip(i);
        let delta = if joining_one { 1 } else { -1 };
        let g = self.g;
        let mut touch = |j: usize| {
            self.to_one[j] += delta;
            self.to_zero[j] -= delta;
        };
        g.out_neighbors(i).iter().for_each(|&j| touch(j));
        if g.is_directed() {
            g.in_neighbors(i).iter().for_each(|&j| touch(j));
        }
        (self.value, self.degenerate) = self.objective.score(&self.ctx, &self.summary);
        self.flips += 1;
        if self.flips.is_multiple_of(100) {
            debug_assert!((self.value - self.recomputed_value()).abs() <= 1e-9 * (1.0 + self.value.abs()));
        }
    }

    /// The objective at the current labels, recomputed from scratch.
    pub fn recomputed_value(&self) -> f64 {
        self.objective.score(&self.ctx, &Summary::of(self.g, &self.x)).0
    }

    /// Climbs until no flip improves or `max_iters` flips were made.
    pub fn run(&mut self, max_iters: usize) {
        while self.flips < max_iters && self.step().is_some() {}
    }
}

/// A labelling with independent fair-coin labels, resampled until both
/// groups have at least `min_group` members.
pub fn random_partition<R: Rng>(n: usize, min_group: usize, rng: &mut R) -> Partition {
    loop {
        let x = Partition::from_bools((0..n).map(|_| rng.random_bool(0.5)));
        if x.ones() >= min_group && x.zeros() >= min_group {
            return x;
        }
    }
}

struct Trajectory {
    labels: Partition,
    value: f64,
    degenerate: bool,
    flips: usize,
}

fn run_restart(g: &Graph, c: &GraphConstants, obj: Objective, cfg: &FitConfig, restart: usize) -> Result<Trajectory> {
    let n = g.node_count();
    let start = match (&cfg.warm_start, restart) {
        (Some(w), 0) => w.clone(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
            random_partition(n, cfg.min_group, &mut rng)
        }
    };
    let mut climber = Climber::new(g, c, obj, start, cfg.min_group)?;
    climber.run(cfg.max_iters.unwrap_or(n * n));
    Ok(Trajectory { value: climber.value, degenerate: climber.degenerate, flips: climber.flips, labels: climber.x })
}

/// Multi-restart greedy search. Restart `r` is seeded with `seed + r`, so the
/// result does not depend on the order restarts run in.
pub fn greedy_fit(g: &Graph, c: &GraphConstants, obj: Objective, cfg: &FitConfig) -> Result<FitResult> {
    let n = g.node_count();
    if cfg.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    if cfg.min_group < MIN_GROUP {
        return Err(Error::InvalidParameter(format!("min_group must be at least {MIN_GROUP}")));
    }
    if n < 2 * cfg.min_group + 1 {
        return Err(Error::GraphTooSmall { nodes: n, min: 2 * cfg.min_group + 1 });
    }
    if c.nodes != n || c.directed != g.is_directed() {
        return Err(Error::InvalidParameter("graph constants belong to a different graph".into()));
    }

    #[cfg(feature = "parallel")]
    let runs: Vec<Result<Trajectory>> = {
        use rayon::prelude::*;
        (0..cfg.restarts).into_par_iter().map(|r| run_restart(g, c, obj, cfg, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<Result<Trajectory>> = (0..cfg.restarts).map(|r| run_restart(g, c, obj, cfg, r)).collect();

    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let restart_values = runs.iter().map(|t| t.value).collect();
    let iterations = runs.iter().map(|t| t.flips).sum();
    let best = runs
        .into_iter()
        .reduce(|best, t| if t.value > best.value { t } else { best })
        .expect("at least one restart");
    Ok(FitResult {
        objective: obj,
        labels: best.labels,
        value: best.value,
        restart_values,
        iterations,
        degenerate: best.degenerate,
    })
}

/// Global optimum over every labelling with both groups `>= min_group`.
/// Ties go to the lexicographically smallest label vector.
pub fn exhaustive_fit(g: &Graph, c: &GraphConstants, obj: Objective, min_group: usize) -> Result<FitResult> {
    let n = g.node_count();
    if n > EXHAUSTIVE_MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "exhaustive search is limited to {EXHAUSTIVE_MAX_NODES} nodes, got {n}"
        )));
    }
    if n < 2 * min_group.max(MIN_GROUP) {
        return Err(Error::GraphTooSmall { nodes: n, min: 2 * min_group.max(MIN_GROUP) });
    }
    let ctx = Context::new(g, c);
    let mut best: Option<(Partition, f64, bool)> = None;
    let mut evaluated = 0;
    for mask in 0u32..(1u32 << n) {
        let ones = mask.count_ones() as usize;
        if ones < min_group || n - ones < min_group {
            continue;
        }
        let x = Partition::from_bools((0..n).map(|i| mask >> i & 1 == 1));
        let (v, degenerate) = obj.score(&ctx, &Summary::of(g, &x));
        evaluated += 1;
        let better = match &best {
            None => true,
            Some((bx, bv, _)) => v > *bv || (v == *bv && x.labels() < bx.labels()),
        };
        if better {
            best = Some((x, v, degenerate));
        }
    }
    let (labels, value, degenerate) = best.ok_or(Error::GroupTooSmall { ones: 0, zeros: n, min: min_group })?;
    Ok(FitResult { objective: obj, labels, value, restart_values: vec![value], iterations: evaluated, degenerate })
}
