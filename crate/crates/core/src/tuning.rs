//! Permutation GAP statistic for choosing the sparsity level.
//!
//! For each candidate value the converged sparse objective `O` is computed on
//! the data and on `B` structure-free copies, and
//! `gap = log O(data) - mean_b log O(copy_b)`. Multivariate copies permute
//! every feature column independently. Functional copies split the domain
//! into contiguous blocks of equal measure and, inside each block, reassign
//! the curve segments to a random permutation of the curves.
//!
//! The same `B` copies are shared by every candidate. All clustering runs are
//! independent and evaluated in parallel, with results collected in a fixed
//! order.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{soft_sparse_kmeans_mv, sparse_kmeans_fd, sparse_kmeans_mv, KMeansConfig};
use crate::error::{Error, Result};
use crate::seeding::{derive_seed, rng};
use crate::types::{Dataset, FunctionalDataset};

/// Stream index reserved for permutation seeds.
const PERMUTATION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    pub b_perms: usize,
    /// Functional data only: number of equal-measure sub-domains.
    pub n_subdomains: usize,
    /// Pick the sparsest candidate whose gap is within one permutation
    /// standard deviation of the best, instead of the plain argmax.
    pub one_sd_rule: bool,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            b_perms: 20,
            n_subdomains: 20,
            one_sd_rule: false,
        }
    }
}

/// Gap statistic per candidate sparsity value.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    pub m_grid: Vec<f64>,
    pub gap: Vec<f64>,
    pub obs_log_obj: Vec<f64>,
    pub perm_log_obj_mean: Vec<f64>,
    pub perm_log_obj_sd: Vec<f64>,
    /// Candidates whose objective was not positive on the data or on some
    /// permuted copy; their gap is NaN and they are never selected.
    pub excluded: Vec<bool>,
    pub b_perms: usize,
}

impl GapCurve {
    /// Index of the selected candidate.
    ///
    /// Plain rule: the largest gap, ties to the lower index (less sparsity for
    /// an increasing grid). With `one_sd_rule`: the candidate with the largest
    /// sparsity value among those within one sd of the best gap.
    pub fn select(&self, one_sd_rule: bool) -> Option<usize> {
        let valid = (0..self.gap.len()).filter(|&i| !self.excluded[i]);
        let best = valid
            .clone()
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(b) if self.gap[b] >= self.gap[i] => Some(b),
                _ => Some(i),
            })?;
        if !one_sd_rule {
            return Some(best);
        }
        let floor = self.gap[best] - self.perm_log_obj_sd[best];
        valid
            .filter(|&i| self.gap[i] >= floor)
            .max_by(|&a, &b| self.m_grid[a].total_cmp(&self.m_grid[b]).then(b.cmp(&a)))
    }
}

/// Copy of `d` with every column independently shuffled across observations.
pub fn permute_columns(d: &Dataset, r: &mut ChaCha8Rng) -> Result<Dataset> {
    let mut values = d.values().clone();
    let mut col: Vec<f64> = Vec::with_capacity(d.n_obs());
    for mut c in values.columns_mut() {
        col.clear();
        col.extend(c.iter());
        col.shuffle(r);
        c.iter_mut().zip(&col).for_each(|(dst, &v)| *dst = v);
    }
    Dataset::new(values)
}

/// Sub-domain index of every grid point for `n_blocks` equal-measure blocks.
pub fn block_index(grid: &[f64], n_blocks: usize) -> Vec<usize> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    grid.iter()
        .map(|&x| (((x - lo) / (hi - lo) * n_blocks as f64) as usize).min(n_blocks - 1))
        .collect()
}

/// Copy of `d` where, inside each sub-domain, curve `i` receives the segment
/// of curve `perm_block(i)`.
pub fn permute_blocks(
    d: &FunctionalDataset,
    n_blocks: usize,
    r: &mut ChaCha8Rng,
) -> Result<FunctionalDataset> {
    if n_blocks == 0 {
        return Err(Error::InvalidConfig("n_subdomains must be >= 1".into()));
    }
    let blocks = block_index(d.grid(), n_blocks);
    let n = d.n_obs();
    let src = d.values();
    let mut values = Array2::zeros(src.raw_dim());
    let mut perm: Vec<usize> = (0..n).collect();
    for b in 0..n_blocks {
        perm.iter_mut().enumerate().for_each(|(i, p)| *p = i);
        perm.shuffle(r);
        for (g, _) in blocks.iter().enumerate().filter(|(_, &bg)| bg == b) {
            for i in 0..n {
                values[[i, g]] = src[[perm[i], g]];
            }
        }
    }
    FunctionalDataset::new(d.grid().to_vec(), values)
}

fn permutation_seeds(cfg: &KMeansConfig, b_perms: usize) -> Vec<u64> {
    let master = derive_seed(cfg.seed, PERMUTATION_STREAM);
    (0..b_perms as u64)
        .map(|b| derive_seed(master, b))
        .collect()
}

/// Objective value, with numerical breakdowns mapped to 0 (excluded later).
fn objective_or_zero(res: Result<f64>) -> Result<f64> {
    match res {
        Ok(o) => Ok(o),
        Err(e) if !e.is_input_error() => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn assemble(
    grid: Vec<f64>,
    obs: Vec<f64>,
    perms: Vec<Vec<f64>>,
    b_perms: usize,
) -> Result<GapCurve> {
    let n = grid.len();
    let mut curve = GapCurve {
        m_grid: grid,
        gap: vec![f64::NAN; n],
        obs_log_obj: vec![f64::NAN; n],
        perm_log_obj_mean: vec![f64::NAN; n],
        perm_log_obj_sd: vec![f64::NAN; n],
        excluded: vec![true; n],
        b_perms,
    };
    for i in 0..n {
        if !(obs[i] > 0.0) || perms[i].iter().any(|&o| !(o > 0.0)) {
            continue;
        }
        let logs: Vec<f64> = perms[i].iter().map(|o| o.ln()).collect();
        let b = logs.len() as f64;
        let mean = logs.iter().sum::<f64>() / b;
        let sd = if logs.len() > 1 {
            (logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (b - 1.0)).sqrt()
        } else {
            0.0
        };
        curve.obs_log_obj[i] = obs[i].ln();
        curve.perm_log_obj_mean[i] = mean;
        curve.perm_log_obj_sd[i] = sd;
        curve.gap[i] = curve.obs_log_obj[i] - mean;
        curve.excluded[i] = false;
    }
    if curve.excluded.iter().all(|&e| e) {
        return Err(Error::DegenerateObjective);
    }
    Ok(curve)
}

/// Evaluates `objective(candidate, dataset)` on the data (dataset index 0)
/// and the permuted copies (1..=B), in parallel, in a fixed order.
fn evaluate<D: Sync, P: Sync + Copy>(
    candidates: &[P],
    datasets: &[D],
    objective: impl Fn(P, &D) -> Result<f64> + Sync,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let jobs: Vec<(usize, usize)> = (0..candidates.len())
        .flat_map(|c| (0..datasets.len()).map(move |d| (c, d)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, d)| objective_or_zero(objective(candidates[c], &datasets[d])))
        .collect::<Result<_>>()?;
    let per = datasets.len();
    let obs = (0..candidates.len()).map(|c| values[c * per]).collect();
    let perms = (0..candidates.len())
        .map(|c| values[c * per + 1..(c + 1) * per].to_vec())
        .collect();
    Ok((obs, perms))
}

fn check_b(opts: &GapOptions, grid_len: usize) -> Result<()> {
    if opts.b_perms == 0 {
        return Err(Error::InvalidConfig("B_perms must be >= 1".into()));
    }
    if grid_len == 0 {
        return Err(Error::InvalidConfig("empty sparsity grid".into()));
    }
    Ok(())
}

fn mv_copies(d: &Dataset, opts: &GapOptions, cfg: &KMeansConfig) -> Result<Vec<Dataset>> {
    let mut out = vec![d.clone()];
    for seed in permutation_seeds(cfg, opts.b_perms) {
        out.push(permute_columns(d, &mut rng(seed))?);
    }
    Ok(out)
}

/// GAP selection of the number `m` of zero feature weights.
pub fn tune_m_mv(
    d: &Dataset,
    m_grid: &[usize],
    opts: &GapOptions,
    cfg: &KMeansConfig,
) -> Result<(usize, GapCurve)> {
    check_b(opts, m_grid.len())?;
    if let Some(&m) = m_grid.iter().find(|&&m| m >= d.n_features()) {
        return Err(Error::SparsityOutOfRange {
            m: m as f64,
            range: format!("0 <= m < {}", d.n_features()),
        });
    }
    let copies = mv_copies(d, opts, cfg)?;
    let (obs, perms) = evaluate(m_grid, &copies, |m, x| {
        sparse_kmeans_mv(x, m, cfg).map(|r| r.objective())
    })?;
    let curve = assemble(
        m_grid.iter().map(|&m| m as f64).collect(),
        obs,
        perms,
        opts.b_perms,
    )?;
    let best = curve
        .select(opts.one_sd_rule)
        .ok_or(Error::DegenerateObjective)?;
    Ok((m_grid[best], curve))
}

/// GAP selection of the l1 budget `s` for the soft-thresholding baseline.
/// The curve's `m_grid` holds the `s` values.
pub fn tune_s_mv(
    d: &Dataset,
    s_grid: &[f64],
    opts: &GapOptions,
    cfg: &KMeansConfig,
) -> Result<(f64, GapCurve)> {
    check_b(opts, s_grid.len())?;
    let copies = mv_copies(d, opts, cfg)?;
    let (obs, perms) = evaluate(s_grid, &copies, |s, x| {
        soft_sparse_kmeans_mv(x, s, cfg).map(|r| r.objective())
    })?;
    let curve = assemble(s_grid.to_vec(), obs, perms, opts.b_perms)?;
    // Smaller s is sparser, so the one-sd rule walks the other way.
    let best = if opts.one_sd_rule {
        let top = curve.select(false).ok_or(Error::DegenerateObjective)?;
        let floor = curve.gap[top] - curve.perm_log_obj_sd[top];
        (0..s_grid.len())
            .filter(|&i| !curve.excluded[i] && curve.gap[i] >= floor)
            .min_by(|&a, &b| s_grid[a].total_cmp(&s_grid[b]))
            .unwrap_or(top)
    } else {
        curve.select(false).ok_or(Error::DegenerateObjective)?
    };
    Ok((s_grid[best], curve))
}

/// GAP selection of the zero-set measure `m` for functional data.
pub fn tune_m_fd(
    d: &FunctionalDataset,
    m_grid: &[f64],
    opts: &GapOptions,
    cfg: &KMeansConfig,
) -> Result<(f64, GapCurve)> {
    check_b(opts, m_grid.len())?;
    if opts.n_subdomains == 0 {
        return Err(Error::InvalidConfig("n_subdomains must be >= 1".into()));
    }
    if let Some(&m) = m_grid
        .iter()
        .find(|&&m| !(m > 0.0 && m < d.domain_measure()))
    {
        return Err(Error::SparsityOutOfRange {
            m,
            range: format!("0 < m < {}", d.domain_measure()),
        });
    }
    let mut copies = vec![d.clone()];
    for seed in permutation_seeds(cfg, opts.b_perms) {
        copies.push(permute_blocks(d, opts.n_subdomains, &mut rng(seed))?);
    }
    let (obs, perms) = evaluate(m_grid, &copies, |m, x| {
        sparse_kmeans_fd(x, m, cfg).map(|r| r.objective())
    })?;
    let curve = assemble(m_grid.to_vec(), obs, perms, opts.b_perms)?;
    let best = curve
        .select(opts.one_sd_rule)
        .ok_or(Error::DegenerateObjective)?;
    Ok((m_grid[best], curve))
}
