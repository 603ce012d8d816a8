//! Solve the pencil `(A + lambda B) c = 0` through the discrete
//! Neumann-to-Dirichlet reduction: the eigenvalues `tau` of `M = A^{-1} B`
//! relate to the Steklov eigenvalues by `tau = -1/lambda`, and the
//! rank-deficiency of `B` means only `rank(B)` of them are finite.

use crate::assembly::GalerkinSystem;
use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RealMat};
use crate::par::map_indexed;
use num_complex::Complex64;
use std::io::Write;

/// Condition-number gate enforcing the interior-resonance assumption.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative cutoff separating finite pencil eigenvalues from the numerical
/// null space of `B`.
pub const DEFAULT_TAU_TOL: f64 = 1e-10;

/// One Steklov eigenpair: eigenvalue, boundary-normalized coefficient
/// vector, and pencil residual.
#[derive(Debug, Clone)]
pub struct SpectrumPair {
    pub lambda: Complex64,
    pub coeffs: Vec<Complex64>,
    pub residual: f64,
}

/// Finite eigenvalues of the pencil, sorted by descending real part (ties by
/// descending imaginary part). The count equals `rank(B)`.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub pairs: Vec<SpectrumPair>,
}

impl SteklovSpectrum {
    /// Leading (largest real part) eigenvalue.
    pub fn lambda_1(&self) -> Complex64 {
        self.pairs[0].lambda
    }
}

/// Solve a raw pencil; shared by the public solver and the block-decoupling
/// validation path.
pub(crate) fn solve_pencil(
    a: &CMat,
    b: &RealMat,
    tau_tol: f64,
    parallel: bool,
) -> Result<Vec<SpectrumPair>> {
    let n = a.rows;
    let lu = linalg::lu_factor(a).map_err(|_| Error::NearSingular { cond: f64::INFINITY })?;
    let a_inv = linalg::invert(a)?;
    let cond = linalg::condition_one_norm(a, &a_inv);
    if cond > CONDITION_LIMIT {
        return Err(Error::NearSingular { cond });
    }
    // M = A^{-1} B, column by column
    let cols: Vec<Vec<Complex64>> = map_indexed(n, parallel, |j| lu.solve(&b.column_complex(j)));
    let mut m = CMat::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        m.set_column(j, col);
    }
    let (taus, vecs) = linalg::eigen_decompose(&m)?;
    let max_tau = taus.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if max_tau == 0.0 {
        return Err(Error::Numerical(
            "all NtD eigenvalues vanish; B has no effective rank".into(),
        ));
    }
    let a_fro = a.frobenius_norm();
    let b_fro = b.frobenius_norm();
    let mut pairs = Vec::new();
    for (idx, tau) in taus.iter().enumerate() {
        if tau.norm() <= tau_tol * max_tau {
            continue;
        }
        let lambda = -Complex64::new(1.0, 0.0) / tau;
        let mut c = vecs.column(idx);
        // boundary normalization: c^H B c = 1
        let bc = b.mul_vec_complex(&c);
        let quad: f64 = c.iter().zip(&bc).map(|(ci, bi)| (ci.conj() * bi).re).sum();
        if quad <= 0.0 {
            return Err(Error::Numerical(format!(
                "eigenvector {idx} has non-positive boundary norm {quad:e}"
            )));
        }
        let scale = quad.sqrt();
        for v in &mut c {
            *v /= scale;
        }
        // fix the phase: the largest-modulus coefficient becomes real positive
        let (mi, _) = c
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.norm().total_cmp(&y.norm()))
            .expect("nonempty coefficient vector");
        let phase = c[mi] / c[mi].norm();
        for v in &mut c {
            *v /= phase;
        }
        let residual = pencil_residual(a, b, lambda, &c);
        let bound = 1e-8 * (a_fro + lambda.norm() * b_fro);
        if residual > bound {
            return Err(Error::Numerical(format!(
                "pencil residual {residual:e} exceeds bound {bound:e} for lambda = {lambda}"
            )));
        }
        pairs.push(SpectrumPair { lambda, coeffs: c, residual });
    }
    pairs.sort_by(|x, y| {
        y.lambda
            .re
            .total_cmp(&x.lambda.re)
            .then(y.lambda.im.total_cmp(&x.lambda.im))
    });
    Ok(pairs)
}

/// `||(A + lambda B) c||_2 / ||c||_2`.
fn pencil_residual(a: &CMat, b: &RealMat, lambda: Complex64, c: &[Complex64]) -> f64 {
    let ac = a.mul_vec(c);
    let bc = b.mul_vec_complex(c);
    let num: f64 = ac
        .iter()
        .zip(&bc)
        .map(|(x, y)| (x + lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

/// Finite Steklov eigenvalues of the assembled system.
///
/// Fails with [`Error::NearSingular`] when the wavenumber sits too close to
/// an interior Dirichlet/Neumann eigenvalue (condition estimate above
/// `1e12`), which is the discrete form of the resonance assumption.
pub fn solve_spectrum(sys: &GalerkinSystem, tau_tol: f64) -> Result<SteklovSpectrum> {
    let pairs = solve_pencil(&sys.a, &sys.b, tau_tol, true)?;
    Ok(SteklovSpectrum { pairs })
}

/// Pencil residual of one pair against the system.
pub fn convergence_residual(sys: &GalerkinSystem, pair: &SpectrumPair) -> f64 {
    pencil_residual(&sys.a, &sys.b, pair.lambda, &pair.coeffs)
}

/// Eigenfunction samples on a uniform Cartesian grid over `[-1, 1]^2`;
/// points outside the closed unit disk carry no value.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub grid_size: usize,
    /// Row-major over `y` then `x`.
    pub points: Vec<FieldPoint>,
}

#[derive(Debug, Clone)]
pub struct FieldPoint {
    pub x: f64,
    pub y: f64,
    pub value: Option<Complex64>,
}

/// Sample `w_N = sum_j c_j phi_j` for the `index`-th (1-based) eigenpair.
pub fn eigenfunction_field(
    basis: &BasisSet,
    spectrum: &SteklovSpectrum,
    index: usize,
    grid_size: usize,
) -> Result<FieldGrid> {
    if index == 0 || index > spectrum.pairs.len() {
        return Err(Error::Domain(format!(
            "eigenfunction index {index} out of range 1..={}",
            spectrum.pairs.len()
        )));
    }
    if grid_size < 2 {
        return Err(Error::Config("field grid needs at least 2 points per axis".into()));
    }
    let coeffs = &spectrum.pairs[index - 1].coeffs;
    let step = 2.0 / (grid_size - 1) as f64;
    let mut points = Vec::with_capacity(grid_size * grid_size);
    for iy in 0..grid_size {
        let y = -1.0 + step * iy as f64;
        for ix in 0..grid_size {
            let x = -1.0 + step * ix as f64;
            let r2 = x * x + y * y;
            let value = if r2 > 1.0 {
                None
            } else {
                let r = r2.sqrt();
                let theta = y.atan2(x);
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, f) in coeffs.iter().zip(&basis.functions) {
                    acc += c * f.radial(r) * f.angular(theta);
                }
                Some(acc)
            };
            points.push(FieldPoint { x, y, value });
        }
    }
    Ok(FieldGrid { grid_size, points })
}

impl FieldGrid {
    /// CSV with header `x,y,re,im`; absent points leave `re` and `im` empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,re,im")?;
        for p in &self.points {
            match p.value {
                Some(v) => writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, v.re, v.im)?,
                None => writeln!(out, "{:.16e},{:.16e},,", p.x, p.y)?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, QuadratureRule};
    use crate::basis::{build_basis, BasisOrdering};
    use crate::medium::MediumProfile;

    fn constant_system(n: Complex64, k: f64) -> GalerkinSystem {
        let basis = build_basis(4, 5, false, 25, BasisOrdering::SigmaAscending).unwrap();
        assemble(
            &basis,
            &MediumProfile::constant(n),
            k,
            &QuadratureRule::default(),
        )
        .unwrap()
    }

    #[test]
    fn one_by_one_pencil() {
        let basis = build_basis(0, 1, false, 1, BasisOrdering::SigmaAscending).unwrap();
        let sys = assemble(
            &basis,
            &MediumProfile::constant(Complex64::new(2.0, 0.0)),
            1.0,
            &QuadratureRule::default(),
        )
        .unwrap();
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        assert_eq!(spec.pairs.len(), 1);
        // -2 + 2 lambda = 0
        assert!((spec.lambda_1() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(spec.pairs[0].residual < 1e-12);
    }

    #[test]
    fn count_equals_rank_of_b() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        assert_eq!(spec.pairs.len(), 5);
    }

    #[test]
    fn real_medium_gives_real_spectrum() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        for pair in &spec.pairs {
            assert!(
                pair.lambda.im.abs() <= 1e-8,
                "Im(lambda) = {:e}",
                pair.lambda.im
            );
        }
    }

    #[test]
    fn normalization_and_phase_convention() {
        let sys = constant_system(Complex64::new(2.0, 1.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        for pair in &spec.pairs {
            let bc = sys.b.mul_vec_complex(&pair.coeffs);
            let quad: f64 = pair
                .coeffs
                .iter()
                .zip(&bc)
                .map(|(c, b)| (c.conj() * b).re)
                .sum();
            assert!((quad - 1.0).abs() < 1e-10);
            let max = pair
                .coeffs
                .iter()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .unwrap();
            assert!(max.im.abs() < 1e-12 && max.re > 0.0);
        }
    }

    #[test]
    fn ordering_is_descending_real_part() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        for w in spec.pairs.windows(2) {
            assert!(w[0].lambda.re >= w[1].lambda.re);
        }
    }

    #[test]
    fn residual_is_sensitive_to_lambda_perturbation() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        let pair = &spec.pairs[0];
        let base = convergence_residual(&sys, pair);
        let mut perturbed = pair.clone();
        perturbed.lambda += Complex64::new(1e-3, 0.0);
        let bumped = convergence_residual(&sys, &perturbed);
        assert!(bumped - base >= 1e-4, "residual rose only {:e}", bumped - base);
    }

    #[test]
    fn first_eigenfunction_is_radially_symmetric_for_constant_n() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        let field = eigenfunction_field(&sys.basis, &spec, 1, 41).unwrap();
        // compare |w| along a ring: pick grid points with r in [0.45, 0.55]
        let mut values = Vec::new();
        for p in &field.points {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            if (0.49..=0.51).contains(&r) {
                if let Some(v) = p.value {
                    values.push(v.norm());
                }
            }
        }
        assert!(values.len() > 4);
        // direct angular scan at fixed radius
        let c = &spec.pairs[0].coeffs;
        let eval = |r: f64, t: f64| -> Complex64 {
            c.iter()
                .zip(&sys.basis.functions)
                .map(|(ci, f)| ci * f.radial(r) * f.angular(t))
                .sum()
        };
        let baseline = eval(0.5, 0.0).norm();
        let mut var = 0.0f64;
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            var = var.max((eval(0.5, t).norm() - baseline).abs());
        }
        assert!(var < 1e-8, "angular variation {var:e}");
    }

    #[test]
    fn constant_mode_only_field_is_flat() {
        let basis = build_basis(0, 1, false, 1, BasisOrdering::SigmaAscending).unwrap();
        let sys = assemble(
            &basis,
            &MediumProfile::constant(Complex64::new(2.0, 0.0)),
            1.0,
            &QuadratureRule::default(),
        )
        .unwrap();
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        let field = eigenfunction_field(&basis, &spec, 1, 21).unwrap();
        let inside: Vec<Complex64> = field.points.iter().filter_map(|p| p.value).collect();
        let first = inside[0];
        for v in &inside {
            assert!((v - first).norm() < 1e-12);
        }
    }

    #[test]
    fn field_index_out_of_range() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        assert!(eigenfunction_field(&sys.basis, &spec, 0, 11).is_err());
        assert!(eigenfunction_field(&sys.basis, &spec, 6, 11).is_err());
    }

    #[test]
    fn field_csv_marks_outside_points_empty() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let spec = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        let field = eigenfunction_field(&sys.basis, &spec, 1, 5).unwrap();
        let csv = field.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,y,re,im");
        // the corner (-1, -1) lies outside the disk
        let corner = lines.next().unwrap();
        assert!(corner.ends_with(",,"), "corner line: {corner}");
        assert_eq!(csv.lines().count(), 26);
    }

    #[test]
    fn block_decoupling_for_constant_medium() {
        let sys = constant_system(Complex64::new(2.0, 0.0), 1.0);
        let full = solve_spectrum(&sys, DEFAULT_TAU_TOL).unwrap();
        let mut union: Vec<Complex64> = Vec::new();
        for (p, kind) in sys.basis.angular_blocks() {
            let idx = sys.basis.block_indices(p, kind);
            let m = idx.len();
            let mut a = CMat::zeros(m, m);
            let mut b = RealMat::zeros(m);
            for (bi, &gi) in idx.iter().enumerate() {
                for (bj, &gj) in idx.iter().enumerate() {
                    a[(bi, bj)] = sys.a.get(gi, gj);
                    b.set(bi, bj, sys.b.get(gi, gj));
                }
            }
            let sub = solve_pencil(&a, &b, DEFAULT_TAU_TOL, false).unwrap();
            union.extend(sub.iter().map(|p| p.lambda));
        }
        union.sort_by(|x, y| y.re.total_cmp(&x.re));
        assert_eq!(union.len(), full.pairs.len());
        for (u, f) in union.iter().zip(&full.pairs) {
            assert!(
                (u - f.lambda).norm() < 1e-10,
                "block {u} vs full {}",
                f.lambda
            );
        }
    }
}
