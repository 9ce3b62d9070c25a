//! Sparse K-means clustering with hard-thresholded weights.
//!
//! Feature selection in clustering by forcing a fixed number of feature
//! weights (or a fixed measure of the curve domain) to be exactly zero. The
//! crate covers multivariate data (an `N x p` matrix) and functional data
//! (curves sampled on a common grid), plus the soft-thresholding (l1 budget)
//! baseline, permutation GAP tuning of the sparsity level, partition
//! agreement metrics and reproducible synthetic benchmarks.
//!
//! ```
//! use hardsparse::{gen_mv, sparse_kmeans_mv, KMeansConfig, MvScenario};
//!
//! let (data, _truth) = gen_mv(&MvScenario::new(50, 1)).unwrap();
//! let fit = sparse_kmeans_mv(&data, 25, &KMeansConfig::new(3).with_seed(7)).unwrap();
//! assert_eq!(fit.weights.zeros(), 25);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod quadrature;
pub mod seeding;
pub mod simgen;
pub mod tuning;
pub mod types;
pub mod weights;

pub use dispersion::{
    bcss_per_feature, bcss_pointwise, weighted_sq_distance, weighted_sq_distance_mv,
};
pub use engine::{
    kmeans_fd, kmeans_mv, soft_sparse_kmeans_mv, sparse_kmeans_fd, sparse_kmeans_mv,
    weighted_kmeans_fd, weighted_kmeans_mv, KMeansConfig,
};
pub use error::{Error, Result};
pub use metrics::{cer, confusion, ConfusionMatrix};
pub use simgen::{gen_fd, gen_mv, FdScenario, MvScenario};
pub use types::{
    Dataset, FeatureWeights, FunctionalDataset, Partition, SoftWeights, SparseClusterResult,
    WeightFunction, WeightVector,
};
pub use weights::{
    functional_threshold_level, functional_threshold_weights, hard_threshold_weights,
    soft_threshold_weights,
};
