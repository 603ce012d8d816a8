//! Estimate a real refractive index from the leading Steklov eigenvalue:
//! root-solve the separation-of-variables relation for a constant index,
//! then redistribute the estimate over a known inclusion by the area
//! formula.

use crate::error::{Error, Result};
use crate::medium::MediumProfile;
use crate::oracles::sov_eigenvalue;
use crate::specfun::bessel_j;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default search bracket for the constant estimate.
pub const DEFAULT_BRACKET: (f64, f64) = (1.0001, 25.0);

const G_TOL: f64 = 1e-10;
const BISECT_WIDTH: f64 = 1e-6;
const POLE_PAD: f64 = 1e-6;

/// Outcome of the estimation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub lambda_target: f64,
    /// Constant estimate solving `lambda_1(n) = lambda_target`.
    pub n_approx: f64,
    /// Area-corrected estimate, present when inclusion geometry was given.
    pub n_approx2: Option<f64>,
    pub iterations: u32,
    /// `|lambda_1(n_approx) - lambda_target|`.
    pub residual: f64,
}

/// `lambda_1(n) - lambda_target` on the m = 0 branch, for real n.
fn g(k: f64, n: f64, lambda_target: f64) -> Result<f64> {
    Ok(sov_eigenvalue(k, Complex64::new(n, 0.0), 0)?.re - lambda_target)
}

/// Poles of the m = 0 branch inside `(n_lo, n_hi)`: values where
/// `J_0(k sqrt(n))` vanishes, located by sign-scanning `J_0`.
fn m0_poles(k: f64, n_lo: f64, n_hi: f64) -> Result<Vec<f64>> {
    let x_lo = k * n_lo.sqrt();
    let x_hi = k * n_hi.sqrt();
    let mut poles = Vec::new();
    let step = 0.05;
    let mut x = x_lo;
    let j0 = |x: f64| -> Result<f64> { Ok(bessel_j(0, Complex64::new(x, 0.0))?.re) };
    let mut f_prev = j0(x)?;
    while x < x_hi {
        let x_next = (x + step).min(x_hi);
        let f_next = j0(x_next)?;
        if f_prev == 0.0 || f_prev * f_next < 0.0 {
            let (mut a, mut b) = (x, x_next);
            let mut fa = f_prev;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = j0(mid)?;
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let zero = 0.5 * (a + b);
            poles.push((zero / k) * (zero / k));
        }
        x = x_next;
        f_prev = f_next;
    }
    Ok(poles)
}

/// Solve `lambda_1(n) = lambda_target` for a constant index by bracketed
/// bisection plus a secant polish. The bracket is pre-split at the poles of
/// the m = 0 branch so each piece is monotone; the first sub-bracket with a
/// sign change holds the root.
///
/// A target a hair below the value at the bracket floor (the background
/// medium case) would otherwise be missed; when no sign change exists and
/// `|g(n_lo)| <= 1e-3`, the floor is extended down by half once.
pub fn estimate_constant(
    lambda_target: f64,
    k: f64,
    bracket: (f64, f64),
) -> Result<(f64, u32, f64)> {
    estimate_constant_inner(lambda_target, k, bracket, true)
}

fn estimate_constant_inner(
    lambda_target: f64,
    k: f64,
    bracket: (f64, f64),
    allow_floor_extension: bool,
) -> Result<(f64, u32, f64)> {
    let (n_lo, n_hi) = bracket;
    if !(n_lo > 0.0 && n_hi > n_lo) {
        return Err(Error::Config(format!(
            "invalid bracket [{n_lo}, {n_hi}]"
        )));
    }
    // The principal branch increases from g(n_lo); a target marginally below
    // that floor belongs to it, not to a later branch that happens to sweep
    // through the same value.
    if allow_floor_extension {
        let g_floor = g(k, n_lo, lambda_target)?;
        if g_floor > 0.0 && g_floor <= 1e-3 {
            return estimate_constant_inner(lambda_target, k, (0.5 * n_lo, n_hi), false);
        }
    }
    let mut edges = vec![n_lo];
    for pole in m0_poles(k, n_lo, n_hi)? {
        if pole > n_lo + POLE_PAD && pole < n_hi - POLE_PAD {
            edges.push(pole - POLE_PAD);
            edges.push(pole + POLE_PAD);
        }
    }
    edges.push(n_hi);

    let mut iterations = 0u32;
    let mut chunk = edges.chunks_exact(2);
    let sub = loop {
        let Some(&[a, b]) = chunk.next() else {
            return Err(Error::Bracket(format!(
                "lambda_1 = {lambda_target} is not attained on [{n_lo}, {n_hi}] at k = {k}"
            )));
        };
        let ga = g(k, a, lambda_target)?;
        let gb = g(k, b, lambda_target)?;
        iterations += 2;
        if ga == 0.0 {
            return Ok((a, iterations, 0.0));
        }
        if gb == 0.0 {
            return Ok((b, iterations, 0.0));
        }
        if ga * gb < 0.0 {
            break (a, b, ga);
        }
    };
    let (mut a, mut b, mut ga) = sub;
    while b - a > BISECT_WIDTH {
        let mid = 0.5 * (a + b);
        let gm = g(k, mid, lambda_target)?;
        iterations += 1;
        if gm == 0.0 {
            return Ok((mid, iterations, 0.0));
        }
        if ga * gm < 0.0 {
            b = mid;
        } else {
            a = mid;
            ga = gm;
        }
    }
    // secant polish from the bisection endpoints
    let mut x0 = a;
    let mut x1 = b;
    let mut f0 = g(k, x0, lambda_target)?;
    let mut f1 = g(k, x1, lambda_target)?;
    iterations += 2;
    for _ in 0..60 {
        if f1.abs() <= G_TOL {
            return Ok((x1, iterations, f1.abs()));
        }
        let df = f1 - f0;
        let x2 = if df.abs() < 1e-300 {
            0.5 * (x0 + x1)
        } else {
            x1 - f1 * (x1 - x0) / df
        };
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = g(k, x1, lambda_target)?;
        iterations += 1;
    }
    if f1.abs() <= G_TOL {
        Ok((x1, iterations, f1.abs()))
    } else {
        Err(Error::Numerical(format!(
            "secant polish stalled at |g| = {:e}",
            f1.abs()
        )))
    }
}

/// Redistribute a whole-domain average over the scatterer:
/// `n_2 = (n |D| - |D \ Omega|) / |Omega|`.
pub fn area_correction(n_approx: f64, area_d: f64, area_omega: f64) -> Result<f64> {
    if !(area_d > 0.0) {
        return Err(Error::Domain(format!("domain area must be positive, got {area_d}")));
    }
    if !(area_omega > 0.0 && area_omega <= area_d) {
        return Err(Error::Domain(format!(
            "scatterer area must lie in (0, {area_d}], got {area_omega}"
        )));
    }
    if area_omega == area_d {
        // Omega = D: the correction is the identity, keep it exact
        return Ok(n_approx);
    }
    Ok((n_approx * area_d - (area_d - area_omega)) / area_omega)
}

/// Two-step estimate: constant inversion followed by the area correction
/// for the supplied scatterer geometry (a full-disk profile counts as
/// `Omega = D`).
pub fn estimate_two_step(
    lambda_target: f64,
    k: f64,
    geometry: &MediumProfile,
) -> Result<EstimationResult> {
    let (n_approx, iterations, residual) = estimate_constant(lambda_target, k, DEFAULT_BRACKET)?;
    let area = geometry.inclusion_area()?;
    let n_approx2 = area_correction(n_approx, PI, area)?;
    Ok(EstimationResult {
        lambda_target,
        n_approx,
        n_approx2: Some(n_approx2),
        iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::sov_first;

    #[test]
    fn round_trip_constant_two() {
        let (n, _, resid) = estimate_constant(1.3771053, 1.0, DEFAULT_BRACKET).unwrap();
        assert!((n - 2.0).abs() < 1e-5, "got {n}");
        assert!(resid <= 1e-10);
    }

    #[test]
    fn background_medium() {
        let (n, _, _) = estimate_constant(0.575080915, 1.0, DEFAULT_BRACKET).unwrap();
        assert!((n - 1.0).abs() < 1e-6, "got {n}");
    }

    #[test]
    fn forward_inverse_consistency() {
        for n_star in [1.5, 2.0, 3.0] {
            let lambda = sov_first(1.0, Complex64::new(n_star, 0.0), 10).unwrap().re;
            let (n, _, _) = estimate_constant(lambda, 1.0, DEFAULT_BRACKET).unwrap();
            assert!((n - n_star).abs() < 1e-8, "n* = {n_star}: got {n}");
        }
    }

    #[test]
    fn g_is_monotone_between_poles() {
        // sample the principal branch up to just below the first pole at
        // n = j_{0,1}^2 = 5.7832
        let mut prev = f64::NEG_INFINITY;
        for i in 0..100 {
            let n = 1.0001 + (5.70 - 1.0001) * i as f64 / 99.0;
            let v = g(1.0, n, 0.0).unwrap();
            assert!(v > prev, "g not increasing at n = {n}");
            prev = v;
        }
    }

    #[test]
    fn area_correction_examples() {
        let v = area_correction(1.5, PI, PI / 4.0).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        // Omega = D is the exact identity
        let n = 1.37528901;
        assert_eq!(area_correction(n, PI, PI).unwrap(), n);
    }

    #[test]
    fn area_correction_scale_invariance() {
        let a = area_correction(1.7, PI, 0.3).unwrap();
        let b = area_correction(1.7, 7.0 * PI, 7.0 * 0.3).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn area_correction_rejects_bad_areas() {
        assert!(area_correction(1.5, PI, 0.0).is_err());
        assert!(area_correction(1.5, PI, 4.0).is_err());
        assert!(area_correction(1.5, -1.0, 0.5).is_err());
    }

    #[test]
    fn bracket_failure_when_target_unreachable() {
        // the principal branch starts at 0.575; a target below is unreachable
        // on a bracket that stops before the first pole
        let err = estimate_constant(0.2, 1.0, (1.0001, 5.0)).unwrap_err();
        assert!(matches!(err, Error::Bracket(_)));
    }

    #[test]
    fn crosses_the_first_pole_when_needed() {
        // a target on the second branch: lambda_1(n) for n in (5.78, 25)
        // runs from -inf up; pick n* = 9 and recover it
        let lambda = sov_eigenvalue(1.0, Complex64::new(9.0, 0.0), 0).unwrap().re;
        let (n, _, _) = estimate_constant(lambda, 1.0, DEFAULT_BRACKET).unwrap();
        assert!((n - 9.0).abs() < 1e-6, "got {n}");
    }

    #[test]
    fn two_step_full_disk_equals_constant_estimate() {
        let geometry = MediumProfile::constant(Complex64::new(2.0, 0.0));
        let est = estimate_two_step(1.3007182, 1.0, &geometry).unwrap();
        assert_eq!(est.n_approx2, Some(est.n_approx));
        assert!((est.n_approx - 1.920193).abs() < 1e-4, "got {}", est.n_approx);
        assert!(est.residual <= 1e-10);
    }

    #[test]
    fn two_step_disk_half() {
        let geometry = MediumProfile::disk_inclusion_const(
            0.5,
            Complex64::new(2.0, 0.0),
            crate::medium::BACKGROUND,
        )
        .unwrap();
        let est = estimate_two_step(0.78174886356, 1.0, &geometry).unwrap();
        let n2 = est.n_approx2.unwrap();
        assert!((n2 - 2.181511).abs() < 1e-3, "got {n2}");
        // the correction for rho = 1/2 is n2 = 4 n - 3
        assert!((n2 - (4.0 * est.n_approx - 3.0)).abs() < 1e-10);
    }
}
