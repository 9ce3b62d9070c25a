//! Between-cluster dispersion and weighted distances.
//!
//! Both dispersion functionals are "total minus within" pair sums. The
//! ordered-pair double sum over a group is evaluated through the identity
//! `sum_{i,i'} (x_i - x_i')^2 = 2 n sum_i (x_i - mean)^2`, one feature (or
//! grid point) at a time in a fixed order, so results are deterministic.
//!
//! Normalisations differ by a factor two between the two functionals: the
//! per-feature score uses `1/N` and `1/N_k`, the pointwise score `1/(2N)` and
//! `1/(2|C_h|)`. The weight solvers are scale invariant, so this only shows up
//! in reported objective values.

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::types::{Dataset, FunctionalDataset, Partition};

/// Pointwise dispersion on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseDispersion {
    pub values: Vec<f64>,
    /// Some grid point came out negative through rounding and was set to 0.
    pub clamped: bool,
}

fn check_partition(n: usize, part: &Partition) -> Result<()> {
    if part.len() != n {
        return Err(Error::PartitionMismatch {
            expected: n,
            got: part.len(),
        });
    }
    Ok(())
}

/// Total and within-cluster sums of squared deviations for one column.
fn column_tss_wss(col: ArrayView1<'_, f64>, part: &Partition, scratch: &mut [f64]) -> (f64, f64) {
    // Shifting by the first value keeps constant columns exactly at zero.
    let origin = col[0];
    let n = col.len() as f64;
    let mean = origin + col.iter().map(|x| x - origin).sum::<f64>() / n;
    let tss: f64 = col.iter().map(|x| (x - mean) * (x - mean)).sum();

    let k = part.k();
    let (sums, rest) = scratch.split_at_mut(k);
    let counts = &mut rest[..k];
    sums.fill(0.0);
    counts.fill(0.0);
    for (&x, &l) in col.iter().zip(part.labels()) {
        sums[l] += x - origin;
        counts[l] += 1.0;
    }
    for c in 0..k {
        sums[c] = origin + sums[c] / counts[c];
    }
    let wss: f64 = col
        .iter()
        .zip(part.labels())
        .map(|(&x, &l)| (x - sums[l]) * (x - sums[l]))
        .sum();
    (tss, wss)
}

fn columnwise_bcss(values: &Array2<f64>, part: &Partition) -> Vec<f64> {
    let mut scratch = vec![0.0; 2 * part.k()];
    values
        .columns()
        .into_iter()
        .map(|col| {
            let (tss, wss) = column_tss_wss(col, part, &mut scratch);
            tss - wss
        })
        .collect()
}

/// Per-feature between-cluster dispersion
/// `b_j = (1/N) sum_{i,i'} (x_ij - x_i'j)^2 - sum_k (1/N_k) sum_{i,i' in C_k} (x_ij - x_i'j)^2`.
///
/// This is twice the classical `sum_k N_k (mean_kj - mean_j)^2`.
pub fn bcss_per_feature(d: &Dataset, part: &Partition) -> Result<Vec<f64>> {
    check_partition(d.n_obs(), part)?;
    Ok(columnwise_bcss(d.values(), part)
        .into_iter()
        .map(|v| 2.0 * v)
        .collect())
}

/// Pointwise between-cluster dispersion `g(x)` at every grid point, with
/// `1/(2N)` and `1/(2|C_h|)` pair normalisations (the classical BCSS).
pub fn bcss_pointwise(d: &FunctionalDataset, part: &Partition) -> Result<PointwiseDispersion> {
    check_partition(d.n_obs(), part)?;
    let mut clamped = false;
    let values = columnwise_bcss(d.values(), part)
        .into_iter()
        .map(|v| {
            if v < 0.0 {
                clamped = true;
                0.0
            } else {
                v
            }
        })
        .collect();
    Ok(PointwiseDispersion { values, clamped })
}

/// `sum_g quad_g w_g (a_g - b_g)^2`, the grid version of the weighted L2
/// distance between two curves.
pub fn weighted_sq_distance(a: &[f64], b: &[f64], w: &[f64], quad: &[f64]) -> Result<f64> {
    let g = quad.len();
    for len in [a.len(), b.len(), w.len()] {
        if len != g {
            return Err(Error::GridMismatch {
                expected: g,
                got: len,
            });
        }
    }
    Ok(a.iter()
        .zip(b)
        .zip(w.iter().zip(quad))
        .map(|((x, y), (wg, qg))| qg * wg * (x - y) * (x - y))
        .sum())
}

/// `sum_j w_j (a_j - b_j)^2`.
pub fn weighted_sq_distance_mv(a: &[f64], b: &[f64], w: &[f64]) -> Result<f64> {
    let p = w.len();
    for len in [a.len(), b.len()] {
        if len != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: len,
            });
        }
    }
    Ok(a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), wj)| wj * (x - y) * (x - y))
        .sum())
}
