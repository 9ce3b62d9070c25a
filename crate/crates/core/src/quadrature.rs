//! Trapezoidal quadrature on a fixed abscissa grid.

/// Trapezoidal weights for a strictly increasing grid.
///
/// Each interior node receives half of each adjacent interval, the two end
/// nodes half of their single interval. The weights sum to `x_last - x_first`.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let g = grid.len();
    let mut w = vec![0.0; g];
    for i in 1..g {
        let half = 0.5 * (grid[i] - grid[i - 1]);
        w[i - 1] += half;
        w[i] += half;
    }
    w
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
        .collect()
}

/// Approximates the integral of grid samples `f` with weights `quad`.
pub fn integrate(f: &[f64], quad: &[f64]) -> f64 {
    f.iter().zip(quad).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_unit_interval_weights() {
        for g in [2usize, 3, 11, 200] {
            let grid = uniform_grid(0.0, 1.0, g);
            let w = trapezoid_weights(&grid);
            let h = 1.0 / (g - 1) as f64;
            assert!((w[0] - h / 2.0).abs() < 1e-15);
            assert!((w[g - 1] - h / 2.0).abs() < 1e-15);
            for &wi in &w[1..g - 1] {
                assert!((wi - h).abs() < 1e-15);
            }
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_for_linear_functions() {
        let grid = vec![0.0, 0.1, 0.35, 0.9, 2.0];
        let w = trapezoid_weights(&grid);
        let f: Vec<f64> = grid.iter().map(|x| 3.0 * x - 1.0).collect();
        // integral of 3x - 1 over [0, 2] is 6 - 2
        assert!((integrate(&f, &w) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let grid = uniform_grid(-1.0, 3.0, 7);
        assert_eq!(grid[0], -1.0);
        assert_eq!(grid[6], 3.0);
    }
}
