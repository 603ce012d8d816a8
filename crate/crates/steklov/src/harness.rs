//! Study drivers: eigenvalue convergence sweeps, empirical projection rates
//! for the approximation space, boundary eigenfunction errors, and the
//! cross-module validation report.

use crate::assembly::{assemble, assemble_serial, GalerkinSystem, QuadratureRule};
use crate::basis::{build_sigma_prefix, BasisSet, BasisSpec};
use crate::eigensolve::{solve_pencil, solve_spectrum, SteklovSpectrum, DEFAULT_TAU_TOL};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, CMat, RealMat};
use crate::medium::MediumProfile;
use crate::oracles::sov_first;
use crate::par::map_indexed;
use crate::quadrature::{gauss_legendre_on, trapezoid_angles, trapezoid_weight};
use crate::specfun::{bessel_j, bessel_j_prime, bessel_y, bessel_y_prime};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Everything needed to assemble and solve one problem.
#[derive(Debug, Clone)]
pub struct SolverSetup {
    pub wavenumber: f64,
    pub basis: BasisSpec,
    pub quadrature: QuadratureRule,
    pub medium: MediumProfile,
}

impl SolverSetup {
    pub fn assemble(&self) -> Result<GalerkinSystem> {
        let basis = self.basis.build()?;
        assemble(&basis, &self.medium, self.wavenumber, &self.quadrature)
    }

    pub fn solve(&self) -> Result<(GalerkinSystem, SteklovSpectrum)> {
        let sys = self.assemble()?;
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL)?;
        Ok((sys, spec))
    }

    fn assemble_truncated(&self, n: usize) -> Result<GalerkinSystem> {
        let basis = self.basis.truncated(n).build()?;
        assemble(&basis, &self.medium, self.wavenumber, &self.quadrature)
    }
}

/// Unweighted least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// convergence study
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub lambda: Complex64,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Separation-of-variables reference, available for constant media.
    pub oracle: Option<Complex64>,
    /// Log-log slope of the absolute eigenvalue error against N.
    pub slope: Option<f64>,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,lambda_re,lambda_im,rel_error\n");
        for row in &self.rows {
            let rel = row.rel_error.map(fmt).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.n,
                fmt(row.lambda.re),
                fmt(row.lambda.im),
                rel
            ));
        }
        out
    }
}

/// Leading eigenvalue per truncation, with relative errors against the
/// constant-medium oracle when one applies.
pub fn convergence_study(setup: &SolverSetup, n_list: &[usize]) -> Result<ConvergenceStudy> {
    if n_list.is_empty() {
        return Err(Error::Config("empty N list".into()));
    }
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("N list must be non-decreasing".into()));
    }
    let oracle = match &setup.medium {
        MediumProfile::Constant { value } => Some(sov_first(setup.wavenumber, *value, 10)?),
        _ => None,
    };
    let lambdas: Vec<Result<Complex64>> = map_indexed(n_list.len(), true, |i| {
        let sys = setup.assemble_truncated(n_list[i])?;
        Ok(solve_spectrum(&sys, DEFAULT_TAU_TOL)?.lambda_1())
    });
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, lam) in lambdas.into_iter().enumerate() {
        let lambda = lam?;
        let rel_error = oracle.map(|o| (lambda - o).norm() / o.norm());
        rows.push(ConvergenceRow {
            n: n_list[i],
            lambda,
            rel_error,
        });
    }
    let slope = oracle.map(|o| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.n as f64, (r.lambda - o).norm()))
            .collect();
        fit_loglog_slope(&pts)
    });
    Ok(ConvergenceStudy { rows, oracle, slope })
}

// ---------------------------------------------------------------------------
// projection rates
// ---------------------------------------------------------------------------

/// Built-in test functions for the projection study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionTestFunction {
    /// `f(r) = (1 - r^2)^2`, which satisfies the zero-Neumann condition on
    /// the boundary.
    SmoothRadial,
    /// The `k`-th (1-based) reference basis function itself; projection must
    /// reproduce it exactly once `N >= k`.
    BasisElement(usize),
}

impl ProjectionTestFunction {
    fn eval(&self, reference: &BasisSet, r: f64, theta: f64) -> f64 {
        match self {
            ProjectionTestFunction::SmoothRadial => {
                let t = 1.0 - r * r;
                t * t
            }
            ProjectionTestFunction::BasisElement(k) => {
                let f = &reference.functions[*k - 1];
                f.radial(r) * f.angular(theta)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionRow {
    pub n: usize,
    pub l2_error: f64,
    pub h1_error: f64,
}

#[derive(Debug, Clone)]
pub struct ProjectionStudy {
    pub rows: Vec<ProjectionRow>,
    pub l2_slope: Option<f64>,
    pub h1_slope: Option<f64>,
    /// Fraction of the squared norm missed by the reference expansion.
    pub tail_fraction: f64,
    /// Expansion coefficients against the reference family.
    pub coefficients: Vec<f64>,
    pub reference: BasisSet,
}

impl ProjectionStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,l2_error,h1_error\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.n,
                fmt(row.l2_error),
                fmt(row.h1_error)
            ));
        }
        out
    }
}

const PROJECTION_TAIL_LIMIT: f64 = 1e-8;

/// Expand the test function against a sigma-ordered reference family four
/// times larger than the largest requested truncation, then report the
/// projection error decay in the L2 norm and the eigenvalue-weighted series
/// surrogate of the H1 norm.
pub fn projection_rate_study(
    test_function: ProjectionTestFunction,
    n_list: &[usize],
) -> Result<ProjectionStudy> {
    if n_list.is_empty() {
        return Err(Error::Config("empty N list".into()));
    }
    let max_n = *n_list.iter().max().expect("nonempty");
    let ref_size = 4 * max_n;
    let reference = build_sigma_prefix(ref_size)?;
    if let ProjectionTestFunction::BasisElement(k) = test_function {
        if k == 0 || k > ref_size {
            return Err(Error::Config(format!(
                "basis element {k} outside the reference family 1..={ref_size}"
            )));
        }
    }
    let max_p = reference.functions.iter().map(|f| f.p).max().unwrap_or(0);
    let n_theta = 256usize.max(4 * (max_p as usize + 1));
    let (rs, wr) = gauss_legendre_on(64, 0.0, 1.0);
    let thetas = trapezoid_angles(n_theta);
    let w_theta = trapezoid_weight(n_theta);

    // f on the tensor grid, weighted by w_r * r
    let fvals: Vec<Vec<f64>> = thetas
        .iter()
        .map(|&t| {
            rs.iter()
                .zip(&wr)
                .map(|(&r, &w)| test_function.eval(&reference, r, t) * w * r)
                .collect()
        })
        .collect();
    let m = reference.len();
    let coefficients: Vec<f64> = map_indexed(m, true, |j| {
        let f = &reference.functions[j];
        let radial: Vec<f64> = rs.iter().map(|&r| f.radial(r)).collect();
        let mut acc = 0.0;
        for (ti, &t) in thetas.iter().enumerate() {
            let ang = f.angular(t);
            if ang == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for (ri, rv) in radial.iter().enumerate() {
                inner += fvals[ti][ri] * rv;
            }
            acc += inner * ang;
        }
        acc * w_theta
    });

    // squared norm of f by the same rule
    let mut f_norm2 = 0.0;
    for (ti, &t) in thetas.iter().enumerate() {
        for (ri, (&r, &w)) in rs.iter().zip(&wr).enumerate() {
            let v = test_function.eval(&reference, r, t);
            f_norm2 += v * v * w * r;
            let _ = (ti, ri);
        }
    }
    f_norm2 *= w_theta;

    let captured: f64 = coefficients.iter().map(|c| c * c).sum();
    let tail_fraction = ((f_norm2 - captured) / f_norm2).max(0.0);
    if tail_fraction > PROJECTION_TAIL_LIMIT {
        return Err(Error::Numerical(format!(
            "reference expansion is inconclusive: tail fraction {tail_fraction:e} \
             exceeds {PROJECTION_TAIL_LIMIT:e}"
        )));
    }

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n > ref_size {
            return Err(Error::Config(format!(
                "truncation {n} exceeds the reference size {ref_size}"
            )));
        }
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        for j in n..m {
            let c2 = coefficients[j] * coefficients[j];
            l2 += c2;
            h1 += (1.0 + reference.functions[j].sigma) * c2;
        }
        rows.push(ProjectionRow {
            n,
            l2_error: l2.sqrt(),
            h1_error: h1.sqrt(),
        });
    }
    let slope_of = |sel: fn(&ProjectionRow) -> f64| -> Option<f64> {
        if rows.iter().any(|r| sel(r) <= 0.0) {
            None
        } else {
            Some(fit_loglog_slope(
                &rows.iter().map(|r| (r.n as f64, sel(r))).collect::<Vec<_>>(),
            ))
        }
    };
    let l2_slope = slope_of(|r| r.l2_error);
    let h1_slope = slope_of(|r| r.h1_error);
    Ok(ProjectionStudy {
        rows,
        l2_slope,
        h1_slope,
        tail_fraction,
        coefficients,
        reference,
    })
}

// ---------------------------------------------------------------------------
// boundary eigenfunction error
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BoundaryErrorRow {
    pub n: usize,
    pub l2_boundary_error: f64,
}

pub fn boundary_error_csv(rows: &[BoundaryErrorRow]) -> String {
    let mut out = String::from("N,l2_boundary_error\n");
    for row in rows {
        out.push_str(&format!("{},{}\n", row.n, fmt(row.l2_boundary_error)));
    }
    out
}

/// For a constant real medium, compare the boundary trace of the discrete
/// leading eigenfunction against the exact separation-of-variables mode
/// (the radially symmetric `J_0(k sqrt(n) r)`, boundary-normalized), after
/// aligning the unimodular phase.
pub fn boundary_eigenfunction_error(
    setup: &SolverSetup,
    n_list: &[usize],
) -> Result<Vec<BoundaryErrorRow>> {
    let n_const = match &setup.medium {
        MediumProfile::Constant { value } if value.im == 0.0 => value.re,
        _ => {
            return Err(Error::Config(
                "boundary eigenfunction error needs a constant real medium".into(),
            ))
        }
    };
    let _ = n_const;
    // exact boundary trace is the constant 1/sqrt(2 pi)
    let exact = 1.0 / (2.0 * PI).sqrt();
    let n_nodes = 512;
    let thetas = trapezoid_angles(n_nodes);
    let w = trapezoid_weight(n_nodes);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let sys = setup.assemble_truncated(n)?;
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL)?;
        let pair = &spec.pairs[0];
        let traces: Vec<f64> = sys
            .basis
            .functions
            .iter()
            .map(|f| f.boundary_trace_coefficient())
            .collect();
        // inner product <w, w_N> over the boundary
        let mut inner = Complex64::new(0.0, 0.0);
        let mut wn_vals = Vec::with_capacity(n_nodes);
        for &t in &thetas {
            let mut wn = Complex64::new(0.0, 0.0);
            for ((c, f), tr) in pair.coeffs.iter().zip(&sys.basis.functions).zip(&traces) {
                wn += c * tr * f.angular(t);
            }
            inner += exact * wn.conj() * w;
            wn_vals.push(wn);
        }
        let phase = if inner.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            inner / inner.norm()
        };
        let mut err2 = 0.0;
        for wn in &wn_vals {
            err2 += (Complex64::new(exact, 0.0) - phase * wn).norm_sqr() * w;
        }
        rows.push(BoundaryErrorRow {
            n,
            l2_boundary_error: err2.sqrt(),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// validation report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(&format!(
            "{}/{} checks passed\n",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        ));
        out
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

/// Run every module invariant against the given setup and report measured
/// values. Failures are report content, not errors; only unusable
/// configurations (for instance an empty basis) error out.
pub fn validate(setup: &SolverSetup) -> Result<ValidationReport> {
    let basis = setup.basis.build()?;
    let mut checks = Vec::new();

    // basis orthonormality under the 2-D product rule
    {
        let (rs, wr) = gauss_legendre_on(64, 0.0, 1.0);
        let thetas = trapezoid_angles(256);
        let wt = trapezoid_weight(256);
        let n = basis.len();
        let radial: Vec<Vec<f64>> = basis
            .functions
            .iter()
            .map(|f| rs.iter().map(|&r| f.radial(r)).collect())
            .collect();
        let angular: Vec<Vec<f64>> = basis
            .functions
            .iter()
            .map(|f| thetas.iter().map(|&t| f.angular(t)).collect())
            .collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let rad: f64 = (0..rs.len())
                    .map(|ri| radial[i][ri] * radial[j][ri] * wr[ri] * rs[ri])
                    .sum();
                let ang: f64 = (0..thetas.len())
                    .map(|ti| angular[i][ti] * angular[j][ti])
                    .sum::<f64>()
                    * wt;
                let val = rad * ang;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((val - target).abs());
            }
        }
        checks.push(check(
            "basis_orthonormality",
            worst <= 1e-9,
            format!("max |Gram - I| = {worst:.3e} (tol 1e-9)"),
        ));

        // gradient identity: int grad(phi_i) . grad(phi_j) = sigma_j delta_ij
        let deriv: Vec<Vec<f64>> = basis
            .functions
            .iter()
            .map(|f| rs.iter().map(|&r| f.radial_deriv(r)).collect())
            .collect();
        let mut worst_grad = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let fi = &basis.functions[i];
                let fj = &basis.functions[j];
                if fi.p != fj.p || fi.kind != fj.kind {
                    continue; // angular orthogonality is exact
                }
                let p2 = f64::from(fi.p) * f64::from(fi.p);
                let rad: f64 = (0..rs.len())
                    .map(|ri| {
                        let dot = deriv[i][ri] * deriv[j][ri]
                            + p2 * radial[i][ri] * radial[j][ri] / (rs[ri] * rs[ri]);
                        dot * wr[ri] * rs[ri]
                    })
                    .sum();
                let val = rad * fi.angular_factor();
                let target = if i == j { fi.sigma } else { 0.0 };
                worst_grad = worst_grad.max((val - target).abs());
            }
        }
        checks.push(check(
            "gradient_identity",
            worst_grad <= 1e-7,
            format!("max |grad quadrature - sigma delta| = {worst_grad:.3e} (tol 1e-7)"),
        ));
    }

    // assemble and gate on the resonance assumption
    let sys = assemble(&basis, &setup.medium, setup.wavenumber, &setup.quadrature)?;
    {
        let cond = match crate::linalg::invert(&sys.a) {
            Ok(inv) => crate::linalg::condition_one_norm(&sys.a, &inv),
            Err(_) => f64::INFINITY,
        };
        checks.push(check(
            "resonance_probe",
            cond < crate::eigensolve::CONDITION_LIMIT,
            format!("cond_1(A) = {cond:.3e} (limit 1e12)"),
        ));
    }

    // boundary mass rank
    let blocks = basis.angular_blocks().len();
    {
        let evs = sym_eigenvalues(&sys.b);
        let max = evs.iter().cloned().fold(0.0, f64::max);
        let rank = evs.iter().filter(|&&v| v.abs() > 1e-12 * max).count();
        checks.push(check(
            "boundary_mass_rank",
            rank == blocks,
            format!("rank(B) = {rank}, distinct (p, kind) blocks = {blocks}"),
        ));
    }

    match solve_spectrum(&sys, DEFAULT_TAU_TOL) {
        Ok(spec) => {
            checks.push(check(
                "spectrum_count",
                spec.pairs.len() == blocks,
                format!("{} finite eigenvalues vs rank {blocks}", spec.pairs.len()),
            ));
            let a_fro = sys.a.frobenius_norm();
            let b_fro = sys.b.frobenius_norm();
            let mut worst_ratio = 0.0f64;
            for pair in &spec.pairs {
                let bound = 1e-8 * (a_fro + pair.lambda.norm() * b_fro);
                worst_ratio = worst_ratio.max(pair.residual / bound);
            }
            checks.push(check(
                "pencil_residuals",
                worst_ratio <= 1.0,
                format!("max residual/bound = {worst_ratio:.3e}"),
            ));
            let mut worst_norm = 0.0f64;
            for pair in &spec.pairs {
                let bc = sys.b.mul_vec_complex(&pair.coeffs);
                let quad: f64 = pair
                    .coeffs
                    .iter()
                    .zip(&bc)
                    .map(|(c, b)| (c.conj() * b).re)
                    .sum();
                worst_norm = worst_norm.max((quad - 1.0).abs());
            }
            checks.push(check(
                "boundary_normalization",
                worst_norm <= 1e-10,
                format!("max |c^H B c - 1| = {worst_norm:.3e}"),
            ));
            let medium_is_real = matches!(
                &setup.medium,
                MediumProfile::Constant { value } if value.im == 0.0
            );
            if medium_is_real {
                let max_im = spec
                    .pairs
                    .iter()
                    .map(|p| p.lambda.im.abs())
                    .fold(0.0, f64::max);
                checks.push(check(
                    "real_medium_real_spectrum",
                    max_im <= 1e-8,
                    format!("max |Im(lambda)| = {max_im:.3e} (tol 1e-8)"),
                ));
            }
        }
        Err(e) => {
            checks.push(check(
                "spectrum_count",
                false,
                format!("solve failed: {e}"),
            ));
        }
    }

    // monotonicity of lambda_1 in a real constant index at k = 1
    {
        let grid = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];
        let lambdas: Vec<Result<f64>> = map_indexed(grid.len(), true, |i| {
            let medium = MediumProfile::constant(Complex64::new(grid[i], 0.0));
            let sys = assemble(&basis, &medium, 1.0, &setup.quadrature)?;
            Ok(solve_spectrum(&sys, DEFAULT_TAU_TOL)?.lambda_1().re)
        });
        let mut ok = true;
        let mut vals = Vec::new();
        for l in lambdas {
            match l {
                Ok(v) => vals.push(v),
                Err(e) => {
                    checks.push(check("monotonicity", false, format!("solve failed: {e}")));
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let increasing = vals.windows(2).all(|w| w[1] > w[0]);
            checks.push(check(
                "monotonicity",
                increasing,
                format!("lambda_1 over n = 1..4: {vals:?}"),
            ));
        }
    }

    // Wronskian identity on a log grid
    {
        let mut worst = 0.0f64;
        for m in 0..=4u32 {
            for i in 0..20 {
                let t = i as f64 / 19.0;
                let x = 0.1 * (400.0f64).powf(t);
                let j = bessel_j(m, Complex64::new(x, 0.0)).unwrap().re;
                let jp = bessel_j_prime(m, Complex64::new(x, 0.0)).unwrap().re;
                let y = bessel_y(m, x).unwrap();
                let yp = bessel_y_prime(m, x).unwrap();
                worst = worst.max((j * yp - jp * y - 2.0 / (PI * x)).abs());
            }
        }
        checks.push(check(
            "wronskian",
            worst <= 1e-10,
            format!("max residual = {worst:.3e} (tol 1e-10)"),
        ));
    }

    // block decoupling for a constant medium
    {
        let const_medium = match &setup.medium {
            MediumProfile::Constant { value } => *value,
            _ => Complex64::new(2.0, 0.0),
        };
        let medium = MediumProfile::constant(const_medium);
        let dsys = assemble(&basis, &medium, setup.wavenumber, &setup.quadrature)?;
        match solve_spectrum(&dsys, DEFAULT_TAU_TOL) {
            Ok(full) => {
                let mut union: Vec<Complex64> = Vec::new();
                let mut failed = None;
                for (p, kind) in dsys.basis.angular_blocks() {
                    let idx = dsys.basis.block_indices(p, kind);
                    let m = idx.len();
                    let mut a = CMat::zeros(m, m);
                    let mut b = RealMat::zeros(m);
                    for (bi, &gi) in idx.iter().enumerate() {
                        for (bj, &gj) in idx.iter().enumerate() {
                            a[(bi, bj)] = dsys.a.get(gi, gj);
                            b.set(bi, bj, dsys.b.get(gi, gj));
                        }
                    }
                    match solve_pencil(&a, &b, DEFAULT_TAU_TOL, false) {
                        Ok(sub) => union.extend(sub.iter().map(|p| p.lambda)),
                        Err(e) => failed = Some(e),
                    }
                }
                if let Some(e) = failed {
                    checks.push(check("block_decoupling", false, format!("{e}")));
                } else {
                    union.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
                    let mut worst = f64::INFINITY;
                    if union.len() == full.pairs.len() {
                        worst = union
                            .iter()
                            .zip(&full.pairs)
                            .map(|(u, f)| (u - f.lambda).norm())
                            .fold(0.0, f64::max);
                    }
                    checks.push(check(
                        "block_decoupling",
                        worst <= 1e-10,
                        format!("max |union - full| = {worst:.3e} (tol 1e-10)"),
                    ));
                }
            }
            Err(e) => checks.push(check("block_decoupling", false, format!("{e}"))),
        }
    }

    // determinism: repeated and serial assembly are bit-identical, repeated
    // study output is byte-identical
    {
        let s1 = assemble(&basis, &setup.medium, setup.wavenumber, &setup.quadrature)?;
        let s2 = assemble(&basis, &setup.medium, setup.wavenumber, &setup.quadrature)?;
        let s3 = assemble_serial(&basis, &setup.medium, setup.wavenumber, &setup.quadrature)?;
        let matrices_equal = s1.a == s2.a && s1.b == s2.b && s1.a == s3.a && s1.b == s3.b;
        let n_small = basis.len().min(10);
        let list = [n_small.max(1), basis.len()];
        let study_pair = (
            convergence_study(setup, &list),
            convergence_study(setup, &list),
        );
        match study_pair {
            (Ok(c1), Ok(c2)) => {
                let equal = c1.to_csv() == c2.to_csv();
                checks.push(check(
                    "determinism",
                    matrices_equal && equal,
                    format!(
                        "assembly bit-identical (parallel, rerun, serial): {matrices_equal}; \
                         study output byte-identical: {equal}"
                    ),
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                checks.push(check("determinism", false, format!("study failed: {e}")));
            }
        }
    }

    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisOrdering;

    fn default_setup(n: Complex64) -> SolverSetup {
        SolverSetup {
            wavenumber: 1.0,
            basis: BasisSpec::default(),
            quadrature: QuadratureRule::default(),
            medium: MediumProfile::constant(n),
        }
    }

    #[test]
    fn convergence_study_sigma_ascending_sequence() {
        // frozen from the closed-form p=0 block reduction
        // sum_q 1/(sigma_q - k^2 n) = -1/(2 lambda), cross-checked externally:
        // sigma-ascending subsets hold 3/4/5/5 radial modes at N = 10/15/20/25
        let setup = default_setup(Complex64::new(2.0, 0.0));
        let study = convergence_study(&setup, &[10, 15, 20, 25]).unwrap();
        let expected = [1.2500945639, 1.2816652310, 1.3006602601, 1.3006602601];
        for (row, e) in study.rows.iter().zip(&expected) {
            assert!(
                (row.lambda.re - e).abs() < 1e-8,
                "N={}: {} vs {e}",
                row.n,
                row.lambda.re
            );
        }
    }

    #[test]
    fn convergence_study_q_major_tracks_published_table() {
        // q-major filling reproduces the published intermediate columns
        let mut setup = default_setup(Complex64::new(2.0, 0.0));
        setup.basis.ordering = BasisOrdering::QMajor;
        let study = convergence_study(&setup, &[10, 15, 20, 25]).unwrap();
        let expected = [1.1872162, 1.2500365, 1.2816379, 1.3007182];
        for (row, e) in study.rows.iter().zip(&expected) {
            assert!(
                (row.lambda.re - e).abs() < 1e-4,
                "N={}: {} vs {e}",
                row.n,
                row.lambda.re
            );
        }
        let rel_last = study.rows[3].rel_error.unwrap();
        assert!((rel_last - 0.0554693).abs() < 1e-4, "rel error {rel_last}");
        let slope = study.slope.unwrap();
        assert!((-1.3..=-0.7).contains(&slope), "slope {slope}");
    }

    #[test]
    fn convergence_rows_are_deterministic() {
        let setup = default_setup(Complex64::new(2.0, 0.0));
        let study = convergence_study(&setup, &[25, 25]).unwrap();
        assert_eq!(study.rows[0].lambda, study.rows[1].lambda);
        let csv = study.to_csv();
        assert!(csv.starts_with("N,lambda_re,lambda_im,rel_error\n"));
    }

    #[test]
    fn convergence_rejects_decreasing_list() {
        let setup = default_setup(Complex64::new(2.0, 0.0));
        assert!(convergence_study(&setup, &[25, 10]).is_err());
    }

    #[test]
    fn projection_basis_element_is_reproduced() {
        let study =
            projection_rate_study(ProjectionTestFunction::BasisElement(3), &[4, 8]).unwrap();
        for row in &study.rows {
            assert!(
                row.l2_error < 1e-10,
                "N={}: l2 error {}",
                row.n,
                row.l2_error
            );
        }
    }

    #[test]
    fn projection_smooth_radial_decays() {
        let study =
            projection_rate_study(ProjectionTestFunction::SmoothRadial, &[8, 16, 32, 64])
                .unwrap();
        assert!(study.tail_fraction <= 1e-8);
        let slope = study.l2_slope.unwrap();
        assert!(slope <= -0.4, "L2 slope {slope}");
        for w in study.rows.windows(2) {
            assert!(w[1].l2_error < w[0].l2_error);
        }
        // H1 errors dominate L2 errors
        for row in &study.rows {
            assert!(row.h1_error >= row.l2_error);
        }
        // a radially symmetric test function has no angular content
        for (c, f) in study.coefficients.iter().zip(&study.reference.functions) {
            if f.p >= 1 {
                assert!(
                    c.abs() < 1e-12,
                    "(p,q)=({},{}) coefficient {c:e}",
                    f.p,
                    f.q
                );
            }
        }
    }

    #[test]
    fn projection_short_reference_is_inconclusive() {
        // a 4x reference for small N leaves more than 1e-8 of the squared
        // norm in the tail, which must be reported rather than absorbed
        let err = projection_rate_study(ProjectionTestFunction::SmoothRadial, &[8, 16])
            .unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn boundary_error_sits_at_roundoff_on_the_disk() {
        // On a disk with constant n every eigenfunction's boundary trace is
        // one circular harmonic; after L2(boundary) normalization and phase
        // alignment the discrete and exact traces coincide identically, so
        // the measured errors are pure roundoff for every N. The alignment
        // also absorbs an overall sign flip, which is what keeps the values
        // far below the unaligned distance ~2/sqrt(2 pi).
        let setup = default_setup(Complex64::new(2.0, 0.0));
        let rows = boundary_eigenfunction_error(&setup, &[10, 15, 20, 25]).unwrap();
        for row in &rows {
            assert!(
                row.l2_boundary_error <= 1e-10,
                "N={}: boundary error {:e} above roundoff",
                row.n,
                row.l2_boundary_error
            );
        }
        let csv = boundary_error_csv(&rows);
        assert!(csv.starts_with("N,l2_boundary_error\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn validate_default_config_passes() {
        let setup = default_setup(Complex64::new(2.0, 0.0));
        let report = validate(&setup).unwrap();
        assert!(report.all_passed(), "{}", report.to_text());
        assert!(report.to_text().contains("PASS basis_orthonormality"));
    }

    #[test]
    fn validate_flags_near_resonant_wavenumber() {
        // A is diagonal for constant n: singular when k^2 = sigma_j / n
        let sigma2 = 1.8411837813406593f64.powi(2);
        let k = (sigma2 / 2.0).sqrt() + 1e-13;
        let mut setup = default_setup(Complex64::new(2.0, 0.0));
        setup.wavenumber = k;
        let report = validate(&setup).unwrap();
        let probe = report
            .checks
            .iter()
            .find(|c| c.name == "resonance_probe")
            .unwrap();
        assert!(!probe.passed, "{}", probe.detail);
    }

    #[test]
    fn validate_empty_basis_is_config_error() {
        let mut setup = default_setup(Complex64::new(2.0, 0.0));
        setup.basis.truncation = 0;
        assert!(matches!(validate(&setup), Err(Error::Config(_))));
    }

    #[test]
    fn slope_fit_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(-1.25)))
            .collect();
        assert!((fit_loglog_slope(&pts) + 1.25).abs() < 1e-12);
    }
}
