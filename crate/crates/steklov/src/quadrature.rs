//! Quadrature primitives: Gauss–Legendre nodes on an interval and the
//! periodic trapezoid rule on `[0, 2pi)`.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence, seeded with the Chebyshev
/// angle estimate. Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P'_n by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&wi| wi * half).collect(),
    )
}

/// Uniform angular nodes `theta_i = 2 pi i / n`; each carries weight `2 pi / n`.
pub fn trapezoid_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Periodic trapezoid weight for an `n`-node angular rule.
pub fn trapezoid_weight(n: usize) -> f64 {
    2.0 * PI / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        // degree 31 rule: degree-30 monomial over [-1, 1]
        let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(30)).sum();
        assert!((q - 2.0 / 31.0).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(31)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn mapped_rule_integrates_exp() {
        let (x, w) = gauss_legendre_on(24, 0.0, 1.0);
        let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.exp()).sum();
        assert!((q - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_kills_nonzero_harmonics() {
        let th = trapezoid_angles(64);
        let w = trapezoid_weight(64);
        let q: f64 = th.iter().map(|&t| w * (3.0 * t).cos() * (3.0 * t).cos()).sum();
        assert!((q - PI).abs() < 1e-13);
        let z: f64 = th.iter().map(|&t| w * (5.0 * t).sin()).sum();
        assert!(z.abs() < 1e-13);
    }

    #[test]
    fn weights_are_positive_and_sum_to_length() {
        for n in [16, 33, 64, 128] {
            let (_, w) = gauss_legendre(n);
            assert!(w.iter().all(|&wi| wi > 0.0));
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: weight sum {s}");
        }
    }
}
