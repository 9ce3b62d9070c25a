//! Seeded Monte Carlo comparisons on the synthetic scenarios.
//!
//! Run `r` of an experiment with master seed `s` draws its data and seeds
//! every clusterer with `derive_seed(s, r)`, so runs are independent and can
//! be evaluated in parallel without changing the results.

use rayon::prelude::*;

use crate::engine::{
    kmeans_fd, kmeans_mv, soft_sparse_kmeans_mv, sparse_kmeans_fd, sparse_kmeans_mv, KMeansConfig,
};
use crate::error::Result;
use crate::metrics::cer;
use crate::seeding::derive_seed;
use crate::simgen::{gen_fd, gen_mv, FdScenario, MvScenario};
use crate::tuning::{tune_m_fd, tune_m_mv, tune_s_mv, GapOptions};
use crate::types::{
    Dataset, FunctionalDataset, Partition, SoftWeights, SparseClusterResult, WeightFunction,
    WeightVector,
};

/// Candidate numbers of retained features for the default hard grid.
const KEEP: [usize; 16] = [
    2, 5, 8, 10, 12, 15, 20, 25, 35, 50, 75, 100, 150, 200, 300, 400,
];

/// Default `m` grid for `p` features: `p - keep` for the retained counts
/// below `p`, plus `m = 0`, increasing.
pub fn default_m_grid(p: usize) -> Vec<usize> {
    let mut g: Vec<usize> = KEEP.iter().filter(|&&k| k < p).map(|&k| p - k).collect();
    g.push(0);
    g.sort_unstable();
    g
}

/// Default `s` grid for `p` features: values from 1.5 up to `sqrt(p)`.
pub fn default_s_grid(p: usize) -> Vec<f64> {
    let top = (p as f64).sqrt();
    let mut g: Vec<f64> = [
        1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0,
    ]
    .into_iter()
    .filter(|&s| s < top)
    .collect();
    g.push(top);
    g
}

/// How the sparse methods get their sparsity level in each run.
#[derive(Debug, Clone, PartialEq)]
pub enum MvSparsity {
    Fixed {
        m: usize,
        s: f64,
    },
    Gap {
        m_grid: Vec<usize>,
        s_grid: Vec<f64>,
        opts: GapOptions,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvStudyConfig {
    pub p: usize,
    pub runs: usize,
    pub seed: u64,
    pub n_init: usize,
    pub sparsity: MvSparsity,
}

impl MvStudyConfig {
    /// GAP tuning on the default grids with `b_perms` permutations.
    pub fn tuned(p: usize, runs: usize, seed: u64, b_perms: usize) -> Self {
        Self {
            p,
            runs,
            seed,
            n_init: 10,
            sparsity: MvSparsity::Gap {
                m_grid: default_m_grid(p),
                s_grid: default_s_grid(p),
                opts: GapOptions {
                    b_perms,
                    ..GapOptions::default()
                },
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct MvStudyRun {
    pub seed: u64,
    pub truth: Partition,
    pub std: Partition,
    pub soft: SparseClusterResult<SoftWeights>,
    pub hard: SparseClusterResult<WeightVector>,
    pub cer_std: f64,
    pub cer_soft: f64,
    pub cer_hard: f64,
}

fn mv_study_run(c: &MvStudyConfig, r: usize) -> Result<MvStudyRun> {
    let seed = derive_seed(c.seed, r as u64);
    let (d, truth): (Dataset, Partition) = gen_mv(&MvScenario::new(c.p, seed))?;
    let cfg = KMeansConfig::new(MvScenario::K)
        .with_seed(seed)
        .with_n_init(c.n_init);
    let (m, s) = match &c.sparsity {
        MvSparsity::Fixed { m, s } => (*m, *s),
        MvSparsity::Gap {
            m_grid,
            s_grid,
            opts,
        } => (
            tune_m_mv(&d, m_grid, opts, &cfg)?.0,
            tune_s_mv(&d, s_grid, opts, &cfg)?.0,
        ),
    };
    let std = kmeans_mv(&d, &cfg)?;
    let soft = soft_sparse_kmeans_mv(&d, s, &cfg)?;
    let hard = sparse_kmeans_mv(&d, m, &cfg)?;
    Ok(MvStudyRun {
        seed,
        cer_std: cer(&truth, &std)?,
        cer_soft: cer(&truth, &soft.partition)?,
        cer_hard: cer(&truth, &hard.partition)?,
        truth,
        std,
        soft,
        hard,
    })
}

/// Standard, soft-sparse and hard-sparse K-means on the three-class
/// Gaussian scenario.
pub fn run_mv_study(c: &MvStudyConfig) -> Result<Vec<MvStudyRun>> {
    (0..c.runs)
        .into_par_iter()
        .map(|r| mv_study_run(c, r))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum FdSparsity {
    Fixed(f64),
    Gap { m_grid: Vec<f64>, opts: GapOptions },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdStudyConfig {
    pub runs: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub n_init: usize,
    pub sparsity: FdSparsity,
}

impl FdStudyConfig {
    pub fn new(runs: usize, seed: u64, m: f64) -> Self {
        Self {
            runs,
            seed,
            grid_size: 200,
            n_init: 10,
            sparsity: FdSparsity::Fixed(m),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FdStudyRun {
    pub seed: u64,
    pub grid: Vec<f64>,
    pub truth: Partition,
    pub std: Partition,
    pub sparse: SparseClusterResult<WeightFunction>,
    pub cer_std: f64,
    pub cer_sparse: f64,
}

fn fd_study_run(c: &FdStudyConfig, r: usize) -> Result<FdStudyRun> {
    let seed = derive_seed(c.seed, r as u64);
    let scenario = FdScenario {
        grid_size: c.grid_size,
        ..FdScenario::new(seed)
    };
    let (d, truth): (FunctionalDataset, Partition) = gen_fd(&scenario)?;
    let cfg = KMeansConfig::new(FdScenario::K)
        .with_seed(seed)
        .with_n_init(c.n_init);
    let m = match &c.sparsity {
        FdSparsity::Fixed(m) => *m,
        FdSparsity::Gap { m_grid, opts } => tune_m_fd(&d, m_grid, opts, &cfg)?.0,
    };
    let std = kmeans_fd(&d, &cfg)?;
    let sparse = sparse_kmeans_fd(&d, m, &cfg)?;
    Ok(FdStudyRun {
        seed,
        grid: d.grid().to_vec(),
        cer_std: cer(&truth, &std)?,
        cer_sparse: cer(&truth, &sparse.partition)?,
        truth,
        std,
        sparse,
    })
}

/// Standard versus sparse functional K-means on the two-class curve scenario.
pub fn run_fd_study(c: &FdStudyConfig) -> Result<Vec<FdStudyRun>> {
    (0..c.runs)
        .into_par_iter()
        .map(|r| fd_study_run(c, r))
        .collect()
}

/// Mean and sample standard deviation; the deviation is `None` for a single
/// value.
pub fn mean_sd(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.len() > 1)
        .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, sd)
}
