//! Validated data containers shared by every other module.
//!
//! Everything here is immutable once constructed: the constructors check the
//! invariants and the accessors hand out borrowed views.

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::quadrature::trapezoid_weights;

/// Relative slack on unit-norm identities.
pub const EPS_NORM: f64 = 1e-9;

/// Slack for monotonicity checks on an objective value.
pub fn eps_obj(objective: f64) -> f64 {
    1e-12 * (1.0 + objective.abs())
}

/// An `N x p` matrix of observations by features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Array2<f64>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        check_matrix(&values, 1)?;
        Ok(Self {
            values,
            feature_names: None,
        })
    }

    pub fn with_feature_names(values: Array2<f64>, names: Vec<String>) -> Result<Self> {
        let mut d = Self::new(values)?;
        if names.len() != d.n_features() {
            return Err(Error::LengthMismatch {
                expected: d.n_features(),
                got: names.len(),
            });
        }
        d.feature_names = Some(names);
        Ok(d)
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(rows)?)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn n_obs(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }
}

/// `N` curves sampled on a shared, strictly increasing grid.
///
/// Quadrature weights come from the trapezoidal rule, so they sum to
/// `x_G - x_1`, the measure of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDataset {
    grid: Vec<f64>,
    values: Array2<f64>,
    quad: Vec<f64>,
}

impl FunctionalDataset {
    pub fn new(grid: Vec<f64>, values: Array2<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if values.ncols() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                got: values.ncols(),
            });
        }
        check_matrix(&values, 2)?;
        let quad = trapezoid_weights(&grid);
        Ok(Self { grid, values, quad })
    }

    pub fn from_rows(grid: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(grid, rows_to_array(rows)?)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad
    }

    /// Measure of the domain, `x_G - x_1`.
    pub fn domain_measure(&self) -> f64 {
        self.grid[self.grid.len() - 1] - self.grid[0]
    }

    pub fn n_obs(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.grid.len()
    }

    /// Largest spacing between consecutive grid points.
    pub fn max_spacing(&self) -> f64 {
        self.grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn curve(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }
}

fn rows_to_array(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyData("no rows".into()));
    }
    let p = rows[0].len();
    let mut flat = Vec::with_capacity(n * p);
    for r in rows {
        if r.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: r.len(),
            });
        }
        flat.extend_from_slice(r);
    }
    Array2::from_shape_vec((n, p), flat).map_err(|e| Error::EmptyData(e.to_string()))
}

fn check_matrix(values: &Array2<f64>, min_cols: usize) -> Result<()> {
    if values.nrows() < 2 {
        return Err(Error::EmptyData(format!(
            "need at least 2 observations, got {}",
            values.nrows()
        )));
    }
    if values.ncols() < min_cols {
        return Err(Error::EmptyData(format!(
            "need at least {min_cols} columns, got {}",
            values.ncols()
        )));
    }
    for ((row, col), v) in values.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::EmptyData(format!(
            "grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    for (i, x) in grid.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { row: 0, col: i });
        }
    }
    for i in 1..grid.len() {
        if grid[i] <= grid[i - 1] {
            return Err(Error::NonMonotoneGrid { index: i });
        }
    }
    Ok(())
}

/// Assignment of `N` observations to `K` non-empty clusters.
///
/// Labels are zero-based internally; file formats shift them to `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyData("empty labeling".into()));
        }
        let mut sizes = vec![0usize; k];
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
            sizes[label] += 1;
        }
        if let Some(cluster) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster { cluster, k });
        }
        Ok(Self { labels, k })
    }

    /// Infers `K` as one more than the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    /// Relabels clusters in order of first appearance, so that two
    /// partitions compare equal iff they group observations identically.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: self.k }
    }

    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.len() == other.len() && self.canonical().labels == other.canonical().labels
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of each cluster, in observation order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Hard-thresholded feature weights: non-negative, unit norm, `m` zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub values: Vec<f64>,
    pub m: usize,
    /// Set when fewer than `p - m` features had positive dispersion, so the
    /// support is smaller than requested and there are more than `m` zeros.
    pub short_support: bool,
}

impl WeightVector {
    pub fn zeros(&self) -> usize {
        self.values.iter().filter(|&&w| w == 0.0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&j| self.values[j] > 0.0)
            .collect()
    }
}

/// Soft-thresholded feature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftWeights {
    pub values: Vec<f64>,
    pub s: f64,
    /// Threshold applied to the dispersion before normalisation.
    pub delta: f64,
    /// The largest dispersion value was tied, so the l1 bound forced a
    /// shrunken (norm < 1) solution.
    pub tied_max: bool,
}

impl SoftWeights {
    pub fn l1(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Feature weights from either solver.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureWeights {
    Hard(WeightVector),
    Soft(SoftWeights),
}

impl FeatureWeights {
    pub fn values(&self) -> &[f64] {
        match self {
            FeatureWeights::Hard(w) => &w.values,
            FeatureWeights::Soft(w) => &w.values,
        }
    }
}

/// Grid-sampled weighting function.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    pub values: Vec<f64>,
    pub m: f64,
    /// Level `k` defining the retained set `{b > k}`.
    pub level: f64,
}

impl WeightFunction {
    /// Closed intervals `[x_a, x_b]` spanned by maximal runs of grid points
    /// with positive weight.
    pub fn support_intervals(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        for (g, &w) in self.values.iter().enumerate() {
            match (w > 0.0, start) {
                (true, None) => start = Some(g),
                (false, Some(s)) => {
                    out.push((grid[s], grid[g - 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((grid[s], grid[grid.len() - 1]));
        }
        out
    }

    /// Quadrature measure of the zero set.
    pub fn zero_measure(&self, quad: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(quad)
            .filter(|(&w, _)| w == 0.0)
            .map(|(_, &q)| q)
            .sum()
    }

    /// Quadrature L2 norm.
    pub fn l2_norm(&self, quad: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(quad)
            .map(|(&w, &q)| q * w * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Outcome of one sparse clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseClusterResult<W> {
    pub partition: Partition,
    pub weights: W,
    /// Weighted objective after each outer iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl<W> SparseClusterResult<W> {
    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}
