//! K-means under feature or domain weights, and the sparse clustering loops.

mod lloyd;
mod sparse;

pub use lloyd::{weighted_lloyd, KMeansConfig, LloydFit};
pub use sparse::{soft_sparse_kmeans_mv, sparse_kmeans_fd, sparse_kmeans_mv};

use crate::error::{Error, Result};
use crate::types::{Dataset, FunctionalDataset, Partition};

/// K-means on `d` with per-feature weights `w` in the distance
/// `sum_j w_j (x_ij - x_i'j)^2`.
pub fn weighted_kmeans_mv(d: &Dataset, w: &[f64], cfg: &KMeansConfig) -> Result<Partition> {
    if w.len() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: d.n_features(),
            got: w.len(),
        });
    }
    Ok(weighted_lloyd(d.values().view(), w, cfg, cfg.seed, None)?.partition)
}

/// Functional K-means under the weighted L2 distance
/// `int w(x) (f_i(x) - f_i'(x))^2 dx`, discretised with the dataset's
/// quadrature weights.
pub fn weighted_kmeans_fd(
    d: &FunctionalDataset,
    w: &[f64],
    cfg: &KMeansConfig,
) -> Result<Partition> {
    let coords = functional_coords(d, w)?;
    Ok(weighted_lloyd(d.values().view(), &coords, cfg, cfg.seed, None)?.partition)
}

/// Plain K-means (unit weights).
pub fn kmeans_mv(d: &Dataset, cfg: &KMeansConfig) -> Result<Partition> {
    weighted_kmeans_mv(d, &vec![1.0; d.n_features()], cfg)
}

/// Plain functional K-means (`w = 1`).
pub fn kmeans_fd(d: &FunctionalDataset, cfg: &KMeansConfig) -> Result<Partition> {
    weighted_kmeans_fd(d, &vec![1.0; d.n_points()], cfg)
}

pub(crate) fn functional_coords(d: &FunctionalDataset, w: &[f64]) -> Result<Vec<f64>> {
    if w.len() != d.n_points() {
        return Err(Error::GridMismatch {
            expected: d.n_points(),
            got: w.len(),
        });
    }
    Ok(w.iter().zip(d.quad_weights()).map(|(a, q)| a * q).collect())
}
