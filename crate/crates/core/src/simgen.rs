//! Synthetic benchmark scenarios with known labels.
//!
//! Draws come from a `ChaCha8Rng` seeded with the scenario seed; normal
//! variates use `rand_distr`'s ziggurat sampler on that stream, so a given
//! seed reproduces the same dataset on every platform.

use std::f64::consts::PI;

use ndarray::Array2;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::quadrature::uniform_grid;
use crate::seeding::rng;
use crate::types::{Dataset, FunctionalDataset, Partition};

/// Three Gaussian classes in `p` dimensions separated along the first `q`
/// features only.
///
/// Feature `j` (1-based) has mean `j/p` in every class; on the first `q`
/// features the second class is shifted by `+1.5 sigma` and the third by
/// `-1.5 sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct MvScenario {
    pub p: usize,
    pub q: usize,
    pub per_class: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl MvScenario {
    pub const K: usize = 3;

    pub fn new(p: usize, seed: u64) -> Self {
        Self {
            p,
            q: 10,
            per_class: 20,
            sigma: 0.2,
            seed,
        }
    }

    pub fn mean(&self, class: usize, j: usize) -> f64 {
        let base = j as f64 / self.p as f64;
        if j > self.q {
            return base;
        }
        let shift = match class {
            1 => 1.0,
            2 => -1.0,
            _ => 0.0,
        };
        base + 1.5 * self.sigma * shift
    }
}

pub fn gen_mv(s: &MvScenario) -> Result<(Dataset, Partition)> {
    if s.p == 0 || s.q > s.p || s.per_class == 0 || !(s.sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!("invalid scenario {s:?}")));
    }
    let n = MvScenario::K * s.per_class;
    let mut r = rng(s.seed);
    let noise = Normal::new(0.0, s.sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut values = Array2::zeros((n, s.p));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i / s.per_class;
        labels.push(class);
        for j in 0..s.p {
            values[[i, j]] = s.mean(class, j + 1) + noise.sample(&mut r);
        }
    }
    Ok((
        Dataset::new(values)?,
        Partition::new(labels, MvScenario::K)?,
    ))
}

/// Two classes of curves on `[0, 1]` that coincide up to a vertical shift on
/// the first half of the domain and separate increasingly on the second.
///
/// Each curve draws its own `a ~ N(3, 0.5^2)`, `b ~ N(2, 0.25^2)` and
/// `c ~ N(0, 0.5^2)` (first class) or `c ~ N(0.5, 0.5^2)` (second class).
/// No observation noise is added.
#[derive(Debug, Clone, PartialEq)]
pub struct FdScenario {
    pub grid_size: usize,
    pub per_class: usize,
    pub seed: u64,
}

impl FdScenario {
    pub const K: usize = 2;
    pub const A: (f64, f64) = (3.0, 0.5);
    pub const B: (f64, f64) = (2.0, 0.25);
    pub const C_FIRST: (f64, f64) = (0.0, 0.5);
    pub const C_SECOND: (f64, f64) = (0.5, 0.5);

    pub fn new(seed: u64) -> Self {
        Self {
            grid_size: 200,
            per_class: 100,
            seed,
        }
    }
}

/// First-class curve `(b sin(b pi x) + a)(a - 4x) + c`.
pub fn f1(x: f64, a: f64, b: f64, c: f64) -> f64 {
    (b * (b * PI * x).sin() + a) * (a - 4.0 * x) + c
}

/// Second-class curve: `f1` on `[0, 1/2]`, mirrored slope plus a linear
/// term on `(1/2, 1]`.
pub fn f2(x: f64, a: f64, b: f64, c: f64) -> f64 {
    if x <= 0.5 {
        f1(x, a, b, c)
    } else {
        (b * (b * PI * x).sin() + a) * (a - 4.0 * (1.0 - x)) - 2.0 * c * (x - 1.0)
    }
}

pub fn gen_fd(s: &FdScenario) -> Result<(FunctionalDataset, Partition)> {
    if s.grid_size < 2 || s.per_class == 0 {
        return Err(Error::InvalidConfig(format!("invalid scenario {s:?}")));
    }
    let normal = |(mu, sd): (f64, f64)| Normal::new(mu, sd).expect("finite parameters");
    let (law_a, law_b) = (normal(FdScenario::A), normal(FdScenario::B));
    let laws_c = [normal(FdScenario::C_FIRST), normal(FdScenario::C_SECOND)];

    let grid = uniform_grid(0.0, 1.0, s.grid_size);
    let n = FdScenario::K * s.per_class;
    let mut r = rng(s.seed);
    let mut values = Array2::zeros((n, s.grid_size));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i / s.per_class;
        labels.push(class);
        let a = law_a.sample(&mut r);
        let b = law_b.sample(&mut r);
        let c = laws_c[class].sample(&mut r);
        let f = if class == 0 { f1 } else { f2 };
        for (g, &x) in grid.iter().enumerate() {
            values[[i, g]] = f(x, a, b, c);
        }
    }
    Ok((
        FunctionalDataset::new(grid, values)?,
        Partition::new(labels, FdScenario::K)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mv_means() {
        let s = MvScenario::new(50, 0);
        for j in 1..=10 {
            assert_eq!(s.mean(0, j), j as f64 / 50.0);
            assert!((s.mean(1, j) - s.mean(2, j) - 0.6).abs() < 1e-15);
        }
        assert_eq!(s.mean(1, 11), 11.0 / 50.0);
        assert_eq!(s.mean(2, 50), 1.0);
    }

    #[test]
    fn mv_shapes_and_noise_free_limit() {
        let mut s = MvScenario::new(30, 5);
        let (d, truth) = gen_mv(&s).unwrap();
        assert_eq!((d.n_obs(), d.n_features()), (60, 30));
        assert_eq!(truth.sizes(), vec![20, 20, 20]);

        s.sigma = 0.0;
        let (d, _) = gen_mv(&s).unwrap();
        for i in 0..60 {
            let first = (i / 20) * 20;
            assert_eq!(d.row(i), d.row(first));
        }
    }

    #[test]
    fn mv_rejects_q_above_p() {
        let mut s = MvScenario::new(5, 0);
        s.q = 6;
        assert!(gen_mv(&s).is_err());
    }

    #[test]
    fn mv_is_seed_deterministic() {
        let s = MvScenario::new(20, 17);
        assert_eq!(gen_mv(&s).unwrap(), gen_mv(&s).unwrap());
        let other = MvScenario::new(20, 18);
        assert_ne!(gen_mv(&s).unwrap().0, gen_mv(&other).unwrap().0);
    }

    #[test]
    fn curve_formulas() {
        assert_eq!(f1(0.0, 3.0, 2.0, 0.0), 9.0);
        // first half: a constant vertical shift of c
        for i in 0..=50 {
            let x = i as f64 / 100.0;
            assert!((f2(x, 3.0, 2.0, 0.5) - f1(x, 3.0, 2.0, 0.0) - 0.5).abs() < 1e-12);
        }
        // both branches meet at x = 1/2
        let right =
            (2.0 * (2.0 * PI * 0.5).sin() + 3.0) * (3.0 - 4.0 * 0.5) - 2.0 * 0.5 * (0.5 - 1.0);
        assert!((f2(0.5, 3.0, 2.0, 0.5) - right).abs() < 1e-12);
        assert!((f2(0.5 + 1e-9, 3.0, 2.0, 0.5) - f2(0.5, 3.0, 2.0, 0.5)).abs() < 1e-6);
    }

    #[test]
    fn fd_shapes() {
        let (d, truth) = gen_fd(&FdScenario::new(3)).unwrap();
        assert_eq!((d.n_obs(), d.n_points()), (200, 200));
        assert_eq!(truth.sizes(), vec![100, 100]);
        assert_eq!(d.grid()[0], 0.0);
        assert_eq!(d.grid()[199], 1.0);
        let (again, _) = gen_fd(&FdScenario::new(3)).unwrap();
        assert_eq!(d, again);
    }
}
