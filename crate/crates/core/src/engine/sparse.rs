//! Alternating maximisation of `sum_j w_j b_j(C)` over weights and partition.
//!
//! Starting from plain K-means, each outer iteration
//!
//! 1. computes the dispersion `b` of the current partition and the optimal
//!    weights for it (closed form),
//! 2. re-clusters with K-means under those weights, warm-started from the
//!    current partition,
//!
//! and stops once the partition no longer changes. With the weights held
//! fixed the weighted objective equals a constant minus the weighted WCSS,
//! so the warm-started K-means step cannot lower it, and neither can the
//! weight step. The objective trace is therefore non-decreasing.

use ndarray::Array2;

use super::functional_coords;
use super::lloyd::{weighted_lloyd, KMeansConfig};
use crate::dispersion::{bcss_per_feature, bcss_pointwise};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::seeding::derive_seed;
use crate::types::{
    Dataset, FunctionalDataset, Partition, SoftWeights, SparseClusterResult, WeightFunction,
    WeightVector,
};
use crate::weights::{
    functional_threshold_weights, hard_threshold_weights, soft_threshold_weights,
};

trait WeightedProblem {
    type Weights: Clone;

    fn values(&self) -> &Array2<f64>;
    fn dispersion(&self, part: &Partition) -> Result<Vec<f64>>;
    fn solve(&self, b: &[f64]) -> Result<Self::Weights>;
    fn raw<'a>(&self, w: &'a Self::Weights) -> &'a [f64];
    fn coords(&self, w: &Self::Weights) -> Result<Vec<f64>>;
    fn uniform_coords(&self) -> Vec<f64>;
    fn objective(&self, w: &Self::Weights, b: &[f64]) -> f64;
}

struct HardMv<'a> {
    d: &'a Dataset,
    m: usize,
}

impl WeightedProblem for HardMv<'_> {
    type Weights = WeightVector;

    fn values(&self) -> &Array2<f64> {
        self.d.values()
    }
    fn dispersion(&self, part: &Partition) -> Result<Vec<f64>> {
        bcss_per_feature(self.d, part)
    }
    fn solve(&self, b: &[f64]) -> Result<WeightVector> {
        hard_threshold_weights(b, self.m)
    }
    fn raw<'a>(&self, w: &'a WeightVector) -> &'a [f64] {
        &w.values
    }
    fn coords(&self, w: &WeightVector) -> Result<Vec<f64>> {
        Ok(w.values.clone())
    }
    fn uniform_coords(&self) -> Vec<f64> {
        vec![1.0; self.d.n_features()]
    }
    fn objective(&self, w: &WeightVector, b: &[f64]) -> f64 {
        w.values.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

struct SoftMv<'a> {
    d: &'a Dataset,
    s: f64,
}

impl WeightedProblem for SoftMv<'_> {
    type Weights = SoftWeights;

    fn values(&self) -> &Array2<f64> {
        self.d.values()
    }
    fn dispersion(&self, part: &Partition) -> Result<Vec<f64>> {
        bcss_per_feature(self.d, part)
    }
    fn solve(&self, b: &[f64]) -> Result<SoftWeights> {
        soft_threshold_weights(b, self.s)
    }
    fn raw<'a>(&self, w: &'a SoftWeights) -> &'a [f64] {
        &w.values
    }
    fn coords(&self, w: &SoftWeights) -> Result<Vec<f64>> {
        Ok(w.values.clone())
    }
    fn uniform_coords(&self) -> Vec<f64> {
        vec![1.0; self.d.n_features()]
    }
    fn objective(&self, w: &SoftWeights, b: &[f64]) -> f64 {
        w.values.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

struct HardFd<'a> {
    d: &'a FunctionalDataset,
    m: f64,
}

impl WeightedProblem for HardFd<'_> {
    type Weights = WeightFunction;

    fn values(&self) -> &Array2<f64> {
        self.d.values()
    }
    fn dispersion(&self, part: &Partition) -> Result<Vec<f64>> {
        Ok(bcss_pointwise(self.d, part)?.values)
    }
    fn solve(&self, b: &[f64]) -> Result<WeightFunction> {
        functional_threshold_weights(b, self.m, self.d.quad_weights())
    }
    fn raw<'a>(&self, w: &'a WeightFunction) -> &'a [f64] {
        &w.values
    }
    fn coords(&self, w: &WeightFunction) -> Result<Vec<f64>> {
        functional_coords(self.d, &w.values)
    }
    fn uniform_coords(&self) -> Vec<f64> {
        self.d.quad_weights().to_vec()
    }
    fn objective(&self, w: &WeightFunction, b: &[f64]) -> f64 {
        let wb: Vec<f64> = w.values.iter().zip(b).map(|(x, y)| x * y).collect();
        integrate(&wb, self.d.quad_weights())
    }
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    let diff: f64 = old.iter().zip(new).map(|(a, b)| (a - b) * (a - b)).sum();
    let base: f64 = old.iter().map(|a| a * a).sum();
    if base == 0.0 {
        return f64::INFINITY;
    }
    (diff / base).sqrt()
}

fn alternate<P: WeightedProblem>(
    problem: &P,
    cfg: &KMeansConfig,
) -> Result<SparseClusterResult<P::Weights>> {
    let x = problem.values().view();
    cfg.validate(x.nrows())?;

    let mut part = weighted_lloyd(
        x,
        &problem.uniform_coords(),
        cfg,
        derive_seed(cfg.seed, 0),
        None,
    )?
    .partition;
    let mut history: Vec<Partition> = vec![part.clone()];
    let mut states: Vec<(Partition, P::Weights, f64)> = Vec::new();
    let mut trace = Vec::new();
    let mut prev_w: Option<P::Weights> = None;

    for t in 1..=cfg.max_iter_outer {
        let b = problem.dispersion(&part)?;
        let w = problem.solve(&b)?;
        let coords = problem.coords(&w)?;
        let next = weighted_lloyd(
            x,
            &coords,
            cfg,
            derive_seed(cfg.seed, t as u64),
            Some(&part),
        )?
        .partition;
        let objective = problem.objective(&w, &problem.dispersion(&next)?);
        trace.push(objective);
        states.push((next.clone(), w.clone(), objective));

        let finish = |partition: Partition, weights: P::Weights, trace: Vec<f64>| {
            Ok(SparseClusterResult {
                partition,
                weights,
                objective_trace: trace,
                iterations: t,
                converged: true,
            })
        };

        if next == part {
            return finish(next, w, trace);
        }
        if history.contains(&next) {
            // Cycling between partitions: keep the best state seen.
            let best = states
                .iter()
                .enumerate()
                .fold(0, |bi, (i, s)| if s.2 > states[bi].2 { i } else { bi });
            let (p, w, _) = states.swap_remove(best);
            return finish(p, w, trace);
        }
        if let Some(prev) = &prev_w {
            if relative_change(problem.raw(prev), problem.raw(&w)) < cfg.tol_weights {
                return finish(next, w, trace);
            }
        }
        history.push(next.clone());
        prev_w = Some(w);
        part = next;
    }

    let (partition, weights, _) = states.pop().ok_or(Error::InvalidConfig(
        "max_iter_outer must be positive".into(),
    ))?;
    Ok(SparseClusterResult {
        partition,
        weights,
        objective_trace: trace,
        iterations: cfg.max_iter_outer,
        converged: false,
    })
}

/// Sparse K-means with exactly `m` zero feature weights.
pub fn sparse_kmeans_mv(
    d: &Dataset,
    m: usize,
    cfg: &KMeansConfig,
) -> Result<SparseClusterResult<WeightVector>> {
    if m >= d.n_features() {
        return Err(Error::SparsityOutOfRange {
            m: m as f64,
            range: format!("0 <= m < {}", d.n_features()),
        });
    }
    alternate(&HardMv { d, m }, cfg)
}

/// Sparse K-means with the l1 weight budget `s` (soft thresholding).
pub fn soft_sparse_kmeans_mv(
    d: &Dataset,
    s: f64,
    cfg: &KMeansConfig,
) -> Result<SparseClusterResult<SoftWeights>> {
    let s_max = (d.n_features() as f64).sqrt();
    if !(s >= 1.0 && s <= s_max * (1.0 + 1e-12)) {
        return Err(Error::SOutOfRange { s, max: s_max });
    }
    alternate(&SoftMv { d, s }, cfg)
}

/// Functional sparse K-means: the weight function vanishes on a set of
/// measure at least `m`.
pub fn sparse_kmeans_fd(
    d: &FunctionalDataset,
    m: f64,
    cfg: &KMeansConfig,
) -> Result<SparseClusterResult<WeightFunction>> {
    if !(m > 0.0 && m < d.domain_measure()) {
        return Err(Error::SparsityOutOfRange {
            m,
            range: format!("0 < m < {}", d.domain_measure()),
        });
    }
    alternate(&HardFd { d, m }, cfg)
}
