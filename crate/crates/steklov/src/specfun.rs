//! Bessel functions of integer order and the non-negative roots of `J'_p`.
//!
//! Everything is evaluated from the ascending power series, accumulated in
//! double-double arithmetic so that the cancellation between large terms
//! does not eat the accuracy budget of the root tables and quadrature built
//! on top. For real arguments beyond the series' comfort zone the first-kind
//! function falls back to the trigonometric integral representation
//! `J_m(x) = (1/pi) int_0^pi cos(m t - x sin t) dt`, which the periodic
//! trapezoid rule evaluates to machine precision.

use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest order accepted by the evaluators.
pub const MAX_ORDER: u32 = 64;
/// Largest magnitude accepted for genuinely complex arguments.
pub const MAX_COMPLEX_ARG: f64 = 50.0;
/// Largest magnitude accepted for real arguments of `J` and `J'`.
pub const MAX_REAL_ARG: f64 = 140.0;
/// Domain of the second-kind functions.
pub const MAX_Y_ARG: f64 = 50.0;

const SERIES_SWITCH: f64 = 40.0;
const SERIES_MAX_TERMS: usize = 700;
const INTEGRAL_NODES: usize = 512;

// pi as a double-double constant
const PI_DD: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};
const EULER_GAMMA: f64 = 0.5772156649015329;

fn check_order(m: u32) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {m} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Ascending series for `J_m(z)` in complex double-double arithmetic.
fn j_series_cdd(m: u32, z: Complex64) -> Result<Cdd> {
    let half = Cdd::from_c64(z) * 0.5;
    // t0 = (z/2)^m / m!
    let mut term = Cdd::ONE;
    for i in 1..=m {
        term = term * half / f64::from(i);
    }
    let w = half * half;
    let mut sum = term;
    let mut max_mag = term.mag();
    let hump = 0.25 * z.norm_sqr(); // |z/2|^2
    let mut s = 1usize;
    loop {
        let denom = (s as f64) * (s + m as usize) as f64;
        term = -(term * w) / denom;
        sum = sum + term;
        let mag = term.mag();
        if mag > max_mag {
            max_mag = mag;
        }
        let past_hump = (s as f64) * (s + m as usize) as f64 > hump;
        if past_hump && (mag < 1e-38 * max_mag || mag < 1e-320) {
            return Ok(sum);
        }
        s += 1;
        if s > SERIES_MAX_TERMS {
            return Err(Error::Internal(format!(
                "Bessel series for m={m}, z={z} did not converge in {SERIES_MAX_TERMS} terms"
            )));
        }
    }
}

/// Trapezoid evaluation of the Bessel integral for real `x >= 0`.
fn j_integral_real(m: u32, x: f64) -> f64 {
    let n = INTEGRAL_NODES;
    let mut acc = Dd::ZERO;
    for i in 0..n {
        let theta = 2.0 * PI * (i as f64) / (n as f64);
        acc = acc + (f64::from(m) * theta - x * theta.sin()).cos();
    }
    (acc / n as f64).value()
}

fn j_real(m: u32, x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax > MAX_REAL_ARG {
        return Err(Error::Domain(format!(
            "|x| = {ax} exceeds supported range {MAX_REAL_ARG} for J_{m}"
        )));
    }
    let value = if ax <= SERIES_SWITCH {
        j_series_cdd(m, Complex64::new(ax, 0.0))?.re.value()
    } else {
        j_integral_real(m, ax)
    };
    // J_m(-x) = (-1)^m J_m(x)
    if x < 0.0 && m % 2 == 1 {
        Ok(-value)
    } else {
        Ok(value)
    }
}

/// First-kind Bessel function `J_m(z)` for integer order `m >= 0`.
///
/// Real arguments are accepted up to `|x| <= 140`, complex ones up to
/// `|z| <= 50`. Near the top of the complex range the series loses a few
/// digits to cancellation; at the argument scales the solver produces
/// (`k sqrt(n)` of a few units) the result is accurate to full precision.
pub fn bessel_j(m: u32, z: Complex64) -> Result<Complex64> {
    check_order(m)?;
    if z.im == 0.0 {
        return Ok(Complex64::new(j_real(m, z.re)?, 0.0));
    }
    if z.norm() > MAX_COMPLEX_ARG {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds supported range {MAX_COMPLEX_ARG} for complex J_{m}",
            z.norm()
        )));
    }
    Ok(j_series_cdd(m, z)?.value())
}

/// Derivative `J'_m(z)` via `J'_m = J_(m-1) - (m/z) J_m`, with `J'_0 = -J_1`
/// and the removable singularity at `z = 0` taken from the series directly.
pub fn bessel_j_prime(m: u32, z: Complex64) -> Result<Complex64> {
    check_order(m)?;
    if m == 0 {
        return Ok(-bessel_j(1, z)?);
    }
    if z == Complex64::new(0.0, 0.0) {
        // leading series coefficient: J'_1(0) = 1/2, J'_m(0) = 0 for m >= 2
        return Ok(Complex64::new(if m == 1 { 0.5 } else { 0.0 }, 0.0));
    }
    let jm1 = bessel_j(m - 1, z)?;
    let jm = bessel_j(m, z)?;
    Ok(jm1 - jm * (f64::from(m) / z))
}

fn jp_real(m: u32, x: f64) -> Result<f64> {
    if m == 0 {
        return Ok(-j_real(1, x)?);
    }
    if x == 0.0 {
        return Ok(if m == 1 { 0.5 } else { 0.0 });
    }
    Ok(j_real(m - 1, x)? - f64::from(m) / x * j_real(m, x)?)
}

/// Series terms of `J_m(a r)` at `r = 1`, for Horner evaluation in `r^2`.
///
/// `J_m(a r) = r^m * sum_s coeffs[s] * (r^2)^s` for `r` in `[0, 1]`.
pub(crate) fn j_radial_coeffs(m: u32, a: f64) -> Result<Vec<Dd>> {
    check_order(m)?;
    if !(0.0..=MAX_REAL_ARG).contains(&a) {
        return Err(Error::Domain(format!(
            "radial frequency {a} outside [0, {MAX_REAL_ARG}]"
        )));
    }
    let half = Dd::from_f64(a) * 0.5;
    let mut term = Dd::ONE;
    for i in 1..=m {
        term = term * half / f64::from(i);
    }
    let w = half * half;
    let mut coeffs = vec![term];
    let mut max_mag = term.abs();
    let hump = 0.25 * a * a;
    let mut s = 1usize;
    loop {
        let denom = (s as f64) * (s + m as usize) as f64;
        term = -(term * w) / denom;
        coeffs.push(term);
        max_mag = max_mag.max(term.abs());
        let past_hump = (s as f64) * (s + m as usize) as f64 > hump;
        if past_hump && (term.abs() < 1e-38 * max_mag || term.abs() < 1e-320) {
            return Ok(coeffs);
        }
        s += 1;
        if s > SERIES_MAX_TERMS {
            return Err(Error::Internal(format!(
                "radial series for m={m}, a={a} did not converge"
            )));
        }
    }
}

/// Horner evaluation of the radial series at `r` in `[0, 1]`.
pub(crate) fn j_radial_eval(m: u32, coeffs: &[Dd], r: f64) -> f64 {
    let u = r * r;
    let mut acc = Dd::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * u + *c;
    }
    acc.value() * r.powi(m as i32)
}

fn check_y_domain(m: u32, x: f64) -> Result<()> {
    check_order(m)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "Y_{m} has a logarithmic singularity: x = {x} must be positive"
        )));
    }
    if x > MAX_Y_ARG {
        return Err(Error::Domain(format!(
            "x = {x} exceeds supported range {MAX_Y_ARG} for Y_{m}"
        )));
    }
    Ok(())
}

/// Second-kind Bessel function `Y_m(x)` for real `x > 0`.
pub fn bessel_y(m: u32, x: f64) -> Result<f64> {
    check_y_domain(m, x)?;
    let half = Dd::from_f64(x) * 0.5;
    let w = half * half;
    let j = j_series_cdd(m, Complex64::new(x, 0.0))?.re;

    // (2/pi) ln(x/2) J_m(x); Euler's gamma enters through the psi terms below
    let log_part = j * Dd::from_f64((0.5 * x).ln()) * 2.0 / PI_DD;

    // -(1/pi) sum_{s=0}^{m-1} (m-1-s)!/s! (x/2)^{2s-m}
    let mut finite = Dd::ZERO;
    for s in 0..m {
        // (m-1-s)! / s!
        let mut c = Dd::ONE;
        for i in 1..=(m - 1 - s) {
            c = c * f64::from(i);
        }
        for i in 1..=s {
            c = c / f64::from(i);
        }
        // (x/2)^{2s-m}
        let e = 2 * s as i32 - m as i32;
        let mut p = Dd::ONE;
        for _ in 0..e.unsigned_abs() {
            p = p * half;
        }
        if e < 0 {
            p = Dd::ONE / p;
        }
        finite = finite + c * p;
    }
    let finite_part = finite / PI_DD;

    // -(1/pi) sum_s (-1)^s [psi(s+1) + psi(s+m+1)] / (s!(s+m)!) (x/2)^{2s+m}
    let mut term = Dd::ONE;
    for i in 1..=m {
        term = term * half / f64::from(i);
    }
    // harmonic numbers: psi(k+1) = -gamma + H_k
    let mut h_s = Dd::ZERO;
    let mut h_sm = Dd::ZERO;
    for i in 1..=m {
        h_sm = h_sm + Dd::ONE / f64::from(i);
    }
    let gamma2 = Dd::from_f64(EULER_GAMMA) * 2.0;
    let mut psi_sum = h_s + h_sm - gamma2;
    let mut acc = term * psi_sum;
    let mut max_mag = acc.abs().max(term.abs());
    let hump = 0.25 * x * x;
    let mut s = 1usize;
    loop {
        let denom = (s as f64) * (s + m as usize) as f64;
        term = -(term * w) / denom;
        h_s = h_s + Dd::ONE / s as f64;
        h_sm = h_sm + Dd::ONE / (s + m as usize) as f64;
        psi_sum = h_s + h_sm - gamma2;
        let contrib = term * psi_sum;
        acc = acc + contrib;
        max_mag = max_mag.max(contrib.abs());
        let past_hump = (s as f64) * (s + m as usize) as f64 > hump;
        if past_hump && (contrib.abs() < 1e-38 * max_mag || contrib.abs() < 1e-320) {
            break;
        }
        s += 1;
        if s > SERIES_MAX_TERMS {
            return Err(Error::Internal(format!(
                "Y series for m={m}, x={x} did not converge"
            )));
        }
    }
    let psi_part = acc / PI_DD;

    Ok((log_part - finite_part - psi_part).value())
}

/// Derivative `Y'_m(x)` via `Y'_m = Y_(m-1) - (m/x) Y_m`, with `Y_(-1) = -Y_1`.
pub fn bessel_y_prime(m: u32, x: f64) -> Result<f64> {
    check_y_domain(m, x)?;
    if m == 0 {
        return Ok(-bessel_y(1, x)?);
    }
    Ok(bessel_y(m - 1, x)? - f64::from(m) / x * bessel_y(m, x)?)
}

/// Ascending table of non-negative roots of `J'_p`.
///
/// Convention: for `p = 0` the table starts with the root 0 (the constant
/// Neumann mode); for `p >= 1` only strictly positive roots are stored, since
/// the basis function attached to a zero root would vanish identically.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRootTable {
    pub order: u32,
    pub roots: Vec<f64>,
}

/// Largest root count per table.
pub const MAX_ROOT_COUNT: usize = 64;

const SCAN_STEP: f64 = 0.05;

/// Second derivative from the Bessel ODE:
/// `J''_p(x) = -J'_p(x)/x - (1 - p^2/x^2) J_p(x)`.
fn jpp_real(p: u32, x: f64) -> Result<f64> {
    let pp = f64::from(p);
    Ok(-jp_real(p, x)? / x - (1.0 - pp * pp / (x * x)) * j_real(p, x)?)
}

fn refine_root(p: u32, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = jp_real(p, a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    let fb = jp_real(p, b)?;
    if fb == 0.0 {
        return Ok(b);
    }
    debug_assert!(fa * fb < 0.0);
    // bisection to width 1e-10
    while b - a > 1e-10 {
        let mid = 0.5 * (a + b);
        let fm = jp_real(p, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    // one Newton polish using J'' from the ODE
    let x = 0.5 * (a + b);
    let f = jp_real(p, x)?;
    let df = jpp_real(p, x)?;
    if df != 0.0 {
        let next = x - f / df;
        if next > 0.0 && (next - x).abs() < 1.0 {
            return Ok(next);
        }
    }
    Ok(x)
}

/// First `count` non-negative roots of `J'_p`, by sign-scanning on a 0.05
/// grid followed by bisection and one Newton step.
pub fn jprime_zeros(p: u32, count: usize) -> Result<BesselRootTable> {
    check_order(p)?;
    if count == 0 {
        return Err(Error::Domain("root count must be >= 1".into()));
    }
    if count > MAX_ROOT_COUNT {
        return Err(Error::Domain(format!(
            "root count {count} exceeds supported maximum {MAX_ROOT_COUNT}"
        )));
    }
    let mut roots = Vec::with_capacity(count);
    if p == 0 {
        roots.push(0.0);
    }
    // McMahon: the q-th positive root sits near (q + p/2 - 3/4) pi, so this
    // bound encloses `count` roots with slack.
    let bound = (count as f64 + f64::from(p) / 2.0 + 2.0) * PI;
    if bound > MAX_REAL_ARG {
        return Err(Error::Domain(format!(
            "scan bound {bound:.1} for p={p}, count={count} exceeds the evaluable range {MAX_REAL_ARG}"
        )));
    }
    let mut x_prev = SCAN_STEP;
    let mut f_prev = jp_real(p, x_prev)?;
    while roots.len() < count {
        let x_next = x_prev + SCAN_STEP;
        if x_next > bound {
            return Err(Error::Internal(format!(
                "scan bound exhausted before finding {count} roots of J'_{p}"
            )));
        }
        let f_next = jp_real(p, x_next)?;
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev * f_next < 0.0 {
            roots.push(refine_root(p, x_prev, x_next)?);
        }
        x_prev = x_next;
        f_prev = f_next;
    }
    roots.truncate(count);
    Ok(BesselRootTable { order: p, roots })
}
