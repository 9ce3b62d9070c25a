//! Lloyd iterations under a coordinate-weighted squared distance.
//!
//! `d(x, y) = sum_j c_j (x_j - y_j)^2` with fixed non-negative coordinate
//! weights `c`. Coordinates with `c_j = 0` are dropped up front. Centroids
//! are plain means of the members: with `c` fixed, the mean minimises the
//! weighted within-cluster sum coordinate by coordinate.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding::{derive_seed, rng};
use crate::types::Partition;

/// Settings for K-means and the sparse alternation built on it.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iter_outer: usize,
    pub max_iter_lloyd: usize,
    pub n_init: usize,
    pub seed: u64,
    /// Stop the outer loop once the relative L2 change of the weights drops
    /// below this.
    pub tol_weights: f64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iter_outer: 20,
            max_iter_lloyd: 100,
            n_init: 10,
            seed: 0,
            tol_weights: 1e-6,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_init(mut self, n_init: usize) -> Self {
        self.n_init = n_init;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 1 || self.k > n {
            return Err(Error::KTooLarge { k: self.k, n });
        }
        if self.max_iter_outer == 0 || self.max_iter_lloyd == 0 || self.n_init == 0 {
            return Err(Error::InvalidConfig(
                "iteration counts and n_init must be positive".into(),
            ));
        }
        if !(self.tol_weights >= 0.0) {
            return Err(Error::InvalidConfig("tol_weights must be >= 0".into()));
        }
        Ok(())
    }
}

/// Result of one weighted K-means fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydFit {
    pub partition: Partition,
    pub wcss: f64,
    pub iterations: usize,
    /// Weighted WCSS after every Lloyd step of the winning start.
    pub wcss_trace: Vec<f64>,
}

struct Compact {
    x: Array2<f64>,
    c: Vec<f64>,
}

fn compact(x: ArrayView2<'_, f64>, coord_weights: &[f64]) -> Compact {
    let active: Vec<usize> = (0..coord_weights.len())
        .filter(|&j| coord_weights[j] > 0.0)
        .collect();
    let n = x.nrows();
    let mut data = Vec::with_capacity(n * active.len());
    for i in 0..n {
        let row = x.row(i);
        data.extend(active.iter().map(|&j| row[j]));
    }
    Compact {
        x: Array2::from_shape_vec((n, active.len()), data).expect("shape"),
        c: active.iter().map(|&j| coord_weights[j]).collect(),
    }
}

#[inline]
fn dist(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..c.len() {
        let d = a[j] - b[j];
        s += c[j] * d * d;
    }
    s
}

struct Lloyd<'a> {
    x: &'a Array2<f64>,
    c: &'a [f64],
    k: usize,
}

impl Lloyd<'_> {
    fn row(&self, i: usize) -> &[f64] {
        self.x.row(i).to_slice().expect("standard layout")
    }

    fn means(&self, labels: &[usize]) -> Vec<Vec<f64>> {
        let d = self.c.len();
        let mut sums = vec![vec![0.0; d]; self.k];
        let mut counts = vec![0usize; self.k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        for (s, &n) in sums.iter_mut().zip(&counts) {
            if n > 0 {
                s.iter_mut().for_each(|v| *v /= n as f64);
            }
        }
        sums
    }

    fn wcss(&self, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| dist(self.row(i), &centroids[l], self.c))
            .sum()
    }

    fn plus_plus(&self, seed: u64) -> Vec<Vec<f64>> {
        let n = self.x.nrows();
        let mut r = rng(seed);
        let mut centroids = vec![self.row(r.random_range(0..n)).to_vec()];
        let mut d2: Vec<f64> = (0..n)
            .map(|i| dist(self.row(i), &centroids[0], self.c))
            .collect();
        while centroids.len() < self.k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let target = r.random::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = n - 1;
                for (i, &v) in d2.iter().enumerate() {
                    acc += v;
                    if acc > target && v > 0.0 {
                        pick = i;
                        break;
                    }
                }
                pick
            } else {
                r.random_range(0..n)
            };
            let cent = self.row(next).to_vec();
            for (i, v) in d2.iter_mut().enumerate() {
                *v = v.min(dist(self.row(i), &cent, self.c));
            }
            centroids.push(cent);
        }
        centroids
    }

    fn assign(&self, centroids: &[Vec<f64>], labels: &mut [usize]) {
        for (i, l) in labels.iter_mut().enumerate() {
            let row = self.row(i);
            let mut best = (f64::INFINITY, 0);
            for (c, cent) in centroids.iter().enumerate() {
                let d = dist(row, cent, self.c);
                if d < best.0 {
                    best = (d, c);
                }
            }
            *l = best.1;
        }
    }

    /// Moves the point farthest from its own centroid into each empty cluster.
    fn repair_empty(&self, centroids: &mut [Vec<f64>], labels: &mut [usize]) {
        loop {
            let mut counts = vec![0usize; self.k];
            labels.iter().for_each(|&l| counts[l] += 1);
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                return;
            };
            let mut far = (-1.0, usize::MAX);
            for (i, &l) in labels.iter().enumerate() {
                if counts[l] < 2 {
                    continue;
                }
                let d = dist(self.row(i), &centroids[l], self.c);
                if d > far.0 {
                    far = (d, i);
                }
            }
            let i = far.1;
            labels[i] = empty;
            centroids[empty] = self.row(i).to_vec();
        }
    }

    fn run(
        &self,
        mut centroids: Vec<Vec<f64>>,
        max_iter: usize,
    ) -> (Vec<usize>, f64, usize, Vec<f64>) {
        let n = self.x.nrows();
        let mut labels = vec![usize::MAX; n];
        let mut next = vec![0; n];
        let mut trace = Vec::new();
        let mut iterations = 0;
        for _ in 0..max_iter {
            iterations += 1;
            self.assign(&centroids, &mut next);
            self.repair_empty(&mut centroids, &mut next);
            let changed = next != labels;
            std::mem::swap(&mut labels, &mut next);
            centroids = self.means(&labels);
            trace.push(self.wcss(&labels, &centroids));
            if !changed {
                break;
            }
        }
        let wcss = *trace.last().expect("at least one iteration");
        (labels, wcss, iterations, trace)
    }
}

/// Best-of-`n_init` weighted K-means. Restart `r` is seeded from
/// `derive_seed(seed, r)` with k-means++ under the weighted distance. A warm
/// start partition, when given, is refined as one more candidate; it wins
/// ties, so the result never has a larger WCSS than the warm start.
pub fn weighted_lloyd(
    x: ArrayView2<'_, f64>,
    coord_weights: &[f64],
    cfg: &KMeansConfig,
    seed: u64,
    warm: Option<&Partition>,
) -> Result<LloydFit> {
    let n = x.nrows();
    cfg.validate(n)?;
    if coord_weights.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            got: coord_weights.len(),
        });
    }
    if let Some(j) = coord_weights
        .iter()
        .position(|c| !(c.is_finite() && *c >= 0.0))
    {
        return Err(Error::InvalidWeights(format!(
            "coordinate weight {j} is negative or not finite"
        )));
    }
    if let Some(w) = warm {
        if w.len() != n || w.k() != cfg.k {
            return Err(Error::PartitionMismatch {
                expected: n,
                got: w.len(),
            });
        }
    }

    let data = compact(x, coord_weights);
    let lloyd = Lloyd {
        x: &data.x,
        c: &data.c,
        k: cfg.k,
    };

    let mut best: Option<(Vec<usize>, f64, usize, Vec<f64>)> = None;
    let mut consider = |cand: (Vec<usize>, f64, usize, Vec<f64>)| {
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    };
    if let Some(w) = warm {
        let centroids = lloyd.means(w.labels());
        consider(lloyd.run(centroids, cfg.max_iter_lloyd));
    }
    for r in 0..cfg.n_init {
        let centroids = lloyd.plus_plus(derive_seed(seed, r as u64));
        consider(lloyd.run(centroids, cfg.max_iter_lloyd));
    }
    let (labels, wcss, iterations, wcss_trace) = best.expect("n_init >= 1");
    Ok(LloydFit {
        partition: Partition::new(labels, cfg.k)?.canonical(),
        wcss,
        iterations,
        wcss_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn blobs(n_per: usize, centers: &[[f64; 2]], sd: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sd).unwrap();
        let mut data = Vec::new();
        let mut truth = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..n_per {
                data.push(center[0] + noise.sample(&mut r));
                data.push(center[1] + noise.sample(&mut r));
                truth.push(c);
            }
        }
        (
            Array2::from_shape_vec((n_per * centers.len(), 2), data).unwrap(),
            truth,
        )
    }

    #[test]
    fn separated_blobs_are_recovered() {
        let (x, truth) = blobs(30, &[[0.0, 0.0], [10.0, 10.0]], 0.5, 3);
        let cfg = KMeansConfig::new(2).with_seed(9);
        let fit = weighted_lloyd(x.view(), &[1.0, 1.0], &cfg, cfg.seed, None).unwrap();
        let truth = Partition::new(truth, 2).unwrap();
        assert!(fit.partition.same_grouping(&truth));
    }

    #[test]
    fn masked_feature_still_descends() {
        // clusters differ only in column 0, which is masked out
        let (x, _) = blobs(25, &[[0.0, 0.0], [10.0, 0.0]], 1.0, 4);
        let cfg = KMeansConfig::new(2);
        for seed in 0..5 {
            let fit = weighted_lloyd(x.view(), &[0.0, 1.0], &cfg, seed, None).unwrap();
            for w in fit.wcss_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0]));
            }
        }
    }

    #[test]
    fn warm_start_never_loses() {
        let (x, _) = blobs(20, &[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]], 1.2, 5);
        let cfg = KMeansConfig::new(3).with_n_init(1);
        let first = weighted_lloyd(x.view(), &[1.0, 1.0], &cfg, 1, None).unwrap();
        for seed in 0..10 {
            let again =
                weighted_lloyd(x.view(), &[1.0, 1.0], &cfg, seed, Some(&first.partition)).unwrap();
            assert!(again.wcss <= first.wcss + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_k_and_weights() {
        let x = Array2::<f64>::zeros((3, 2));
        let cfg = KMeansConfig::new(4);
        assert!(matches!(
            weighted_lloyd(x.view(), &[1.0, 1.0], &cfg, 0, None),
            Err(Error::KTooLarge { .. })
        ));
        let cfg = KMeansConfig::new(2);
        assert!(weighted_lloyd(x.view(), &[1.0, -1.0], &cfg, 0, None).is_err());
        assert!(weighted_lloyd(x.view(), &[1.0], &cfg, 0, None).is_err());
    }

    #[test]
    fn identical_points_still_fill_every_cluster() {
        let x = Array2::<f64>::ones((6, 2));
        let cfg = KMeansConfig::new(3);
        let fit = weighted_lloyd(x.view(), &[1.0, 1.0], &cfg, 0, None).unwrap();
        assert!(fit.partition.sizes().iter().all(|&s| s > 0));
        assert_eq!(fit.wcss, 0.0);
    }

    #[test]
    fn all_weights_zero_is_handled() {
        let (x, _) = blobs(5, &[[0.0, 0.0], [3.0, 3.0]], 0.5, 1);
        let cfg = KMeansConfig::new(2);
        let fit = weighted_lloyd(x.view(), &[0.0, 0.0], &cfg, 0, None).unwrap();
        assert_eq!(fit.partition.k(), 2);
        assert_eq!(fit.wcss, 0.0);
    }

    #[test]
    fn same_seed_same_result() {
        let (x, _) = blobs(20, &[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]], 0.8, 8);
        let cfg = KMeansConfig::new(3);
        let a = weighted_lloyd(x.view(), &[0.3, 1.7], &cfg, 77, None).unwrap();
        let b = weighted_lloyd(x.view(), &[0.3, 1.7], &cfg, 77, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.wcss.to_bits(), b.wcss.to_bits());
    }
}
