//! Closed-form feature weights for a fixed partition.
//!
//! Given per-feature separation scores `b` (the between-cluster dispersion of
//! each feature), the weight step of sparse K-means maximises `w . b` over
//! non-negative `w` in the unit ball, subject to a sparsity constraint:
//!
//! * **hard thresholding** fixes the number `m` of zero weights. The optimum
//!   keeps the `p - m` largest scores and normalises them;
//! * **soft thresholding** bounds `||w||_1 <= s` instead. The optimum is the
//!   normalised soft-thresholded score vector, with the threshold found by
//!   bisection;
//! * the **functional** hard threshold replaces the counting measure by the
//!   quadrature measure on a grid: the weight function keeps the level set
//!   `{b > k}` whose complement has measure at least `m`.

use crate::error::{Error, Result};
use crate::types::{SoftWeights, WeightFunction, WeightVector};

/// Tolerance on `| ||w||_1 - s |` for the soft-threshold bisection.
pub const SOFT_L1_TOL: f64 = 1e-10;
/// Iteration cap for the soft-threshold bisection.
pub const SOFT_MAX_ITER: usize = 200;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(col) => Err(Error::NonFinite { row: 0, col }),
        None => Ok(()),
    }
}

/// Hard-thresholded weights with exactly `m` zeros.
///
/// The retained set is the `p - m` largest entries of `b`, ties broken by the
/// lower index. Entries `<= 0` are never retained; when fewer than `p - m`
/// entries are positive the support shrinks and `short_support` is set.
pub fn hard_threshold_weights(b: &[f64], m: usize) -> Result<WeightVector> {
    let p = b.len();
    if m >= p {
        return Err(Error::SparsityOutOfRange {
            m: m as f64,
            range: format!("0 <= m < {p}"),
        });
    }
    check_finite(b)?;

    let mut order: Vec<usize> = (0..p).filter(|&j| b[j] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::NonPositiveDispersion);
    }
    // Stable sort keeps lower indices first among equal values.
    order.sort_by(|&i, &j| b[j].total_cmp(&b[i]));
    let keep = (p - m).min(order.len());
    let support = &order[..keep];

    let scale = b[support[0]];
    let norm = support
        .iter()
        .map(|&j| {
            let r = b[j] / scale;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let mut values = vec![0.0; p];
    for &j in support {
        values[j] = b[j] / scale / norm;
    }
    Ok(WeightVector {
        values,
        m,
        short_support: keep < p - m,
    })
}

fn normalised_shrink(a: &[f64], delta: f64) -> Option<Vec<f64>> {
    let mut w: Vec<f64> = a.iter().map(|&x| (x - delta).max(0.0)).collect();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    w.iter_mut().for_each(|x| *x /= norm);
    Some(w)
}

/// Soft-thresholded weights under the l1 budget `s`, `1 <= s <= sqrt(p)`.
///
/// `w = S(a+, delta) / ||S(a+, delta)||_2` with `delta = 0` when that already
/// meets the budget, otherwise the `delta > 0` giving `||w||_1 = s`.
pub fn soft_threshold_weights(a: &[f64], s: f64) -> Result<SoftWeights> {
    let p = a.len();
    let s_max = (p as f64).sqrt();
    if !(s >= 1.0 && s <= s_max * (1.0 + 1e-12)) {
        return Err(Error::SOutOfRange { s, max: s_max });
    }
    check_finite(a)?;
    let pos: Vec<f64> = a.iter().map(|&x| x.max(0.0)).collect();

    let w0 = normalised_shrink(&pos, 0.0).ok_or(Error::AllZeroAfterThreshold)?;
    if w0.iter().sum::<f64>() <= s + SOFT_L1_TOL {
        return Ok(SoftWeights {
            values: w0,
            s,
            delta: 0.0,
            tied_max: false,
        });
    }

    // At delta -> max(a) only the maxima survive, with l1 = sqrt(#maxima).
    let top = pos.iter().copied().fold(0.0, f64::max);
    let n_top = pos.iter().filter(|&&x| x == top).count();
    let top_only: Vec<f64> = pos
        .iter()
        .map(|&x| {
            if x == top {
                1.0 / (n_top as f64).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let limit_l1 = (n_top as f64).sqrt();
    if limit_l1 > s + SOFT_L1_TOL {
        // The budget is below what any unit-norm solution can reach; spread
        // the budget evenly over the tied maxima.
        let values = pos
            .iter()
            .map(|&x| if x == top { s / n_top as f64 } else { 0.0 })
            .collect();
        return Ok(SoftWeights {
            values,
            s,
            delta: top,
            tied_max: true,
        });
    }

    let l1_at = |delta: f64| -> (f64, Vec<f64>) {
        match normalised_shrink(&pos, delta) {
            Some(w) if delta < top => (w.iter().sum(), w),
            _ => (limit_l1, top_only.clone()),
        }
    };

    let (mut lo, mut hi) = (0.0, top);
    let (mut hi_l1, mut hi_w) = (limit_l1, top_only.clone());
    // Full bisection: on flat stretches of the l1 curve this converges to the
    // smallest admissible threshold.
    for _ in 0..SOFT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (l1, w) = l1_at(mid);
        if l1 > s {
            lo = mid;
        } else {
            hi = mid;
            hi_l1 = l1;
            hi_w = w;
        }
    }
    debug_assert!(hi_l1 <= s && s - hi_l1 <= SOFT_L1_TOL.max(1e-9 * s));
    Ok(SoftWeights {
        values: hi_w,
        s,
        delta: hi,
        tied_max: false,
    })
}

fn check_functional_args(b: &[f64], m: f64, quad: &[f64]) -> Result<f64> {
    if b.len() != quad.len() {
        return Err(Error::GridMismatch {
            expected: quad.len(),
            got: b.len(),
        });
    }
    check_finite(b)?;
    if let Some(index) = b.iter().position(|&v| v < 0.0) {
        return Err(Error::NegativeDispersion { index });
    }
    let total: f64 = quad.iter().sum();
    if !(m > 0.0 && m < total) {
        return Err(Error::SparsityOutOfRange {
            m,
            range: format!("0 < m < {total}"),
        });
    }
    Ok(total)
}

/// Smallest level `k >= 0` whose upper set `{b > k}` has quadrature mass at
/// most `mu(D) - m`.
///
/// Each grid point contributes its whole quadrature weight to whichever side
/// of the level its value falls on. On plateaus the smallest admissible level
/// is chosen, so the zero set may exceed `m`.
pub fn functional_threshold_level(b: &[f64], m: f64, quad: &[f64]) -> Result<f64> {
    let total = check_functional_args(b, m, quad)?;
    let budget = total - m + 1e-12 * total;

    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[j].total_cmp(&b[i]));

    // Walk distinct values downwards; `above` is the mass strictly above the
    // current value, which is non-decreasing along the walk.
    let mut level = b[order[0]];
    let mut above = 0.0;
    let mut g = 0;
    while g < order.len() {
        let v = b[order[g]];
        if above > budget {
            break;
        }
        level = v;
        while g < order.len() && b[order[g]] == v {
            above += quad[order[g]];
            g += 1;
        }
    }
    Ok(level)
}

/// Hard-thresholded weight function `w = b 1_B / ||b||_{L2(B)}` with
/// `B = {b > k}` and `k` from [`functional_threshold_level`].
pub fn functional_threshold_weights(b: &[f64], m: f64, quad: &[f64]) -> Result<WeightFunction> {
    let level = functional_threshold_level(b, m, quad)?;
    let norm_sq: f64 = b
        .iter()
        .zip(quad)
        .filter(|(&v, _)| v > level)
        .map(|(&v, &q)| q * v * v)
        .sum();
    if !(norm_sq > 0.0) {
        return Err(Error::DegenerateDispersion);
    }
    let norm = norm_sq.sqrt();
    let values = b
        .iter()
        .map(|&v| if v > level { v / norm } else { 0.0 })
        .collect();
    Ok(WeightFunction { values, m, level })
}
