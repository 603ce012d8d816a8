//! The L2-orthonormal Neumann eigenfunctions of the Laplacian on the unit
//! disk: `phi(r, theta) = N_pq J_p(sqrt(sigma_pq) r) cos(p theta)` (or sine),
//! where `sqrt(sigma_pq)` runs over the non-negative roots of `J'_p`.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::specfun::{self, jprime_zeros};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Angular factor of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AngularKind {
    Cosine,
    Sine,
}

/// Ordering of a [`BasisSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisOrdering {
    /// Non-decreasing Neumann eigenvalue; ties broken by ascending `p`,
    /// cosine before sine. This is the ordering of the continuous spectrum
    /// and the default.
    #[default]
    SigmaAscending,
    /// Angular order major: all radial modes of `p = 0` first, then `p = 1`,
    /// and so on (cosine before sine within a `(p, q)` pair).
    PMajor,
    /// Radial index major: the first angular mode of every `p`, then the
    /// second, and so on. This is the filling order a nested `q`-outer loop
    /// over the `(p, q)` grid produces.
    QMajor,
}

/// One Neumann eigenfunction of the Laplacian on the unit disk.
#[derive(Debug, Clone)]
pub struct BasisFunction {
    /// Angular order `p >= 0`.
    pub p: u32,
    /// Radial index `q >= 1` into the non-negative root table of `J'_p`.
    pub q: u32,
    pub kind: AngularKind,
    /// Neumann eigenvalue `sigma = root^2` (inverse length squared).
    pub sigma: f64,
    /// Closed-form constant making the L2(D) norm exactly one.
    pub norm_const: f64,
    radial_coeffs: Vec<Dd>,
}

impl BasisFunction {
    fn new(p: u32, q: u32, kind: AngularKind, root: f64) -> Result<Self> {
        if kind == AngularKind::Sine && p == 0 {
            return Err(Error::Config("sine modes require p >= 1".into()));
        }
        let sigma = root * root;
        let angular_factor = if p == 0 { 2.0 * PI } else { PI };
        let norm_const = if sigma == 0.0 {
            1.0 / PI.sqrt()
        } else {
            // valid because J'_p vanishes at the root:
            // int_0^1 J_p(a r)^2 r dr = (1 - p^2/a^2) J_p(a)^2 / 2
            let jp_at_root = specfun::bessel_j(p, Complex64::new(root, 0.0))?.re;
            let radial_factor = if p == 0 {
                1.0
            } else {
                1.0 - f64::from(p) * f64::from(p) / sigma
            };
            1.0 / (angular_factor * radial_factor * jp_at_root * jp_at_root / 2.0).sqrt()
        };
        let radial_coeffs = specfun::j_radial_coeffs(p, root)?;
        Ok(BasisFunction {
            p,
            q,
            kind,
            sigma,
            norm_const,
            radial_coeffs,
        })
    }

    /// Radial part `N_pq J_p(sqrt(sigma) r)` without the domain check.
    #[inline]
    pub fn radial(&self, r: f64) -> f64 {
        self.norm_const * specfun::j_radial_eval(self.p, &self.radial_coeffs, r)
    }

    /// Angular part `cos(p theta)` or `sin(p theta)`.
    #[inline]
    pub fn angular(&self, theta: f64) -> f64 {
        let a = f64::from(self.p) * theta;
        match self.kind {
            AngularKind::Cosine => a.cos(),
            AngularKind::Sine => a.sin(),
        }
    }

    /// Evaluate the basis function at polar coordinates `(r, theta)`.
    pub fn eval(&self, r: f64, theta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!(
                "basis evaluation needs r in [0, 1], got {r}"
            )));
        }
        Ok(self.radial(r) * self.angular(theta))
    }

    /// Coefficient of `cos(p theta)` / `sin(p theta)` in the boundary trace:
    /// `N_pq J_p(sqrt(sigma))`. Nonzero for every basis function since `J_p`
    /// and `J'_p` cannot vanish together.
    pub fn boundary_trace_coefficient(&self) -> f64 {
        self.radial(1.0)
    }

    /// Derivative of the radial part, `N_pq sqrt(sigma) J'_p(sqrt(sigma) r)`.
    pub(crate) fn radial_deriv(&self, r: f64) -> f64 {
        let root = self.sigma.sqrt();
        if root == 0.0 {
            return 0.0;
        }
        let jp = specfun::bessel_j_prime(self.p, Complex64::new(root * r, 0.0))
            .expect("in-range by construction")
            .re;
        self.norm_const * root * jp
    }

    /// Angular integral of the squared angular factor over a full period.
    pub(crate) fn angular_factor(&self) -> f64 {
        if self.p == 0 {
            2.0 * PI
        } else {
            PI
        }
    }
}

/// A truncated, ordered family of disk Neumann eigenfunctions.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub functions: Vec<BasisFunction>,
    pub ordering: BasisOrdering,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Distinct `(p, kind)` pairs present, in first-appearance order.
    pub fn angular_blocks(&self) -> Vec<(u32, AngularKind)> {
        let mut blocks = Vec::new();
        for f in &self.functions {
            if !blocks.contains(&(f.p, f.kind)) {
                blocks.push((f.p, f.kind));
            }
        }
        blocks
    }

    /// Indices of the functions belonging to one `(p, kind)` block.
    pub fn block_indices(&self, p: u32, kind: AngularKind) -> Vec<usize> {
        self.functions
            .iter()
            .enumerate()
            .filter(|(_, f)| f.p == p && f.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Construction parameters for a [`BasisSet`]; the default is the
/// 25-function cosine family with `p <= 4`, `q <= 5` in sigma order.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub p_max: u32,
    pub q_max: u32,
    pub include_sin: bool,
    pub truncation: usize,
    pub ordering: BasisOrdering,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            p_max: 4,
            q_max: 5,
            include_sin: false,
            truncation: 25,
            ordering: BasisOrdering::SigmaAscending,
        }
    }
}

impl BasisSpec {
    pub fn build(&self) -> Result<BasisSet> {
        build_basis(
            self.p_max,
            self.q_max,
            self.include_sin,
            self.truncation,
            self.ordering,
        )
    }

    /// Same family truncated to `n` functions.
    pub fn truncated(&self, n: usize) -> BasisSpec {
        BasisSpec {
            truncation: n,
            ..self.clone()
        }
    }
}

/// First `count` cosine functions of the *global* sigma ordering, without a
/// `(p_max, q_max)` window. Used for reference expansions that must follow
/// the continuous spectrum; the angular order is grown until the cutoff
/// eigenvalue encloses `count` modes.
pub fn build_sigma_prefix(count: usize) -> Result<BasisSet> {
    use crate::specfun::{MAX_ORDER, MAX_ROOT_COUNT};
    use std::f64::consts::PI;
    if count == 0 {
        return Err(Error::Config("prefix size must be >= 1".into()));
    }
    let mut cutoff = PI * (count as f64).sqrt() + PI;
    for _attempt in 0..4 {
        let mut modes: Vec<(u32, u32, f64)> = Vec::new();
        for p in 0..=MAX_ORDER {
            if f64::from(p) > cutoff {
                break;
            }
            // McMahon estimate of how many roots sit below the cutoff
            let est = (cutoff / PI - f64::from(p) / 2.0 + 2.0).ceil();
            if est < 1.0 {
                continue;
            }
            let q_req = (est as usize).min(MAX_ROOT_COUNT);
            let table = jprime_zeros(p, q_req)?;
            for (qi, &root) in table.roots.iter().enumerate() {
                if root <= cutoff {
                    modes.push((p, qi as u32 + 1, root));
                }
            }
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| (a.2 * a.2).total_cmp(&(b.2 * b.2)).then(a.0.cmp(&b.0)));
            modes.truncate(count);
            let functions = modes
                .into_iter()
                .map(|(p, q, root)| BasisFunction::new(p, q, AngularKind::Cosine, root))
                .collect::<Result<Vec<_>>>()?;
            return Ok(BasisSet {
                functions,
                ordering: BasisOrdering::SigmaAscending,
            });
        }
        cutoff *= 1.2;
    }
    Err(Error::Config(format!(
        "cannot enclose {count} modes within the evaluable eigenvalue range"
    )))
}

/// Build the first `truncation` basis functions with `p <= p_max`,
/// `1 <= q <= q_max` under the requested ordering. Sine modes (for
/// non-symmetric media) are included only when `include_sin` is set.
pub fn build_basis(
    p_max: u32,
    q_max: u32,
    include_sin: bool,
    truncation: usize,
    ordering: BasisOrdering,
) -> Result<BasisSet> {
    if truncation == 0 {
        return Err(Error::Config("basis truncation must be >= 1".into()));
    }
    if q_max == 0 {
        return Err(Error::Config("q_max must be >= 1".into()));
    }
    let kinds_per_p = |p: u32| if include_sin && p > 0 { 2 } else { 1 };
    let available: usize = (0..=p_max).map(|p| kinds_per_p(p) * q_max as usize).sum();
    if truncation > available {
        return Err(Error::Config(format!(
            "truncation {truncation} exceeds the {available} functions available \
             for p_max={p_max}, q_max={q_max}, include_sin={include_sin}"
        )));
    }
    let mut functions = Vec::with_capacity(available);
    for p in 0..=p_max {
        let table = jprime_zeros(p, q_max as usize)?;
        for (qi, &root) in table.roots.iter().enumerate() {
            let q = qi as u32 + 1;
            functions.push(BasisFunction::new(p, q, AngularKind::Cosine, root)?);
            if include_sin && p > 0 {
                functions.push(BasisFunction::new(p, q, AngularKind::Sine, root)?);
            }
        }
    }
    match ordering {
        BasisOrdering::SigmaAscending => {
            functions.sort_by(|a, b| {
                a.sigma
                    .total_cmp(&b.sigma)
                    .then(a.p.cmp(&b.p))
                    .then(a.kind.cmp(&b.kind))
            });
        }
        BasisOrdering::PMajor => {
            functions.sort_by(|a, b| {
                a.p.cmp(&b.p).then(a.q.cmp(&b.q)).then(a.kind.cmp(&b.kind))
            });
        }
        BasisOrdering::QMajor => {
            functions.sort_by(|a, b| {
                a.q.cmp(&b.q).then(a.p.cmp(&b.p)).then(a.kind.cmp(&b.kind))
            });
        }
    }
    functions.truncate(truncation);
    Ok(BasisSet { functions, ordering })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_legendre_on, trapezoid_angles, trapezoid_weight};

    fn default_basis() -> BasisSet {
        build_basis(4, 5, false, 25, BasisOrdering::SigmaAscending).unwrap()
    }

    #[test]
    fn constant_mode_comes_first() {
        let b = default_basis();
        let f = &b.functions[0];
        assert_eq!((f.p, f.q), (0, 1));
        assert_eq!(f.sigma, 0.0);
        let v = f.eval(0.37, 1.2).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((v - 0.5641895835).abs() < 1e-10);
    }

    #[test]
    fn single_constant_function_basis() {
        let b = build_basis(0, 1, false, 1, BasisOrdering::PMajor).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.functions[0].sigma, 0.0);
    }

    #[test]
    fn sigma_ascending_first_ten_index_set() {
        let b = build_basis(4, 5, false, 10, BasisOrdering::SigmaAscending).unwrap();
        let got: Vec<(u32, u32)> = b.functions.iter().map(|f| (f.p, f.q)).collect();
        let expected = vec![
            (0, 1),
            (1, 1),
            (2, 1),
            (0, 2),
            (3, 1),
            (4, 1),
            (1, 2),
            (2, 2),
            (0, 3),
            (3, 2),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn default_truncation_ends_at_p4_q5() {
        let b = default_basis();
        assert_eq!(b.len(), 25);
        let last = &b.functions[24];
        assert_eq!((last.p, last.q), (4, 5));
        assert!((last.sigma.sqrt() - 19.196).abs() < 1e-3);
    }

    #[test]
    fn truncation_beyond_capacity_is_config_error() {
        assert!(matches!(
            build_basis(4, 5, false, 26, BasisOrdering::SigmaAscending),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sine_modes_only_for_positive_p() {
        let b = build_basis(2, 2, true, 10, BasisOrdering::PMajor).unwrap();
        assert_eq!(b.len(), 10); // 2 + 4 + 4
        assert!(b
            .functions
            .iter()
            .all(|f| f.kind == AngularKind::Cosine || f.p >= 1));
    }

    #[test]
    fn vanishes_at_origin_for_positive_p() {
        let b = default_basis();
        for f in &b.functions {
            if f.p >= 1 {
                assert_eq!(f.eval(0.0, 0.7).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn rejects_r_outside_unit_interval() {
        let b = default_basis();
        assert!(b.functions[0].eval(1.0 + 1e-12, 0.0).is_err());
        assert!(b.functions[0].eval(-0.1, 0.0).is_err());
    }

    #[test]
    fn closed_form_norm_matches_quadrature() {
        let b = default_basis();
        let (rs, wr) = gauss_legendre_on(64, 0.0, 1.0);
        let th = trapezoid_angles(256);
        let wt = trapezoid_weight(256);
        for f in &b.functions {
            let mut norm2 = 0.0;
            for (&r, &w) in rs.iter().zip(&wr) {
                let rad2 = f.radial(r) * f.radial(r) * r * w;
                let ang2: f64 = th.iter().map(|&t| f.angular(t) * f.angular(t)).sum();
                norm2 += rad2 * ang2 * wt;
            }
            assert!(
                (norm2 - 1.0).abs() < 1e-10,
                "(p,q)=({},{}): |phi|^2 = {norm2}",
                f.p,
                f.q
            );
        }
    }

    #[test]
    fn boundary_trace_is_consistent_with_quadrature() {
        let b = default_basis();
        let th = trapezoid_angles(512);
        let wt = trapezoid_weight(512);
        for f in &b.functions {
            let t = f.boundary_trace_coefficient();
            assert!(t != 0.0);
            let quad: f64 = th
                .iter()
                .map(|&theta| {
                    let v = t * f.angular(theta);
                    v * v * wt
                })
                .sum();
            assert!(
                (quad - f.angular_factor() * t * t).abs() < 1e-10,
                "(p,q)=({},{})",
                f.p,
                f.q
            );
        }
        // constant mode trace
        assert!((b.functions[0].boundary_trace_coefficient() - 1.0 / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eval_example_p0_q2_at_boundary() {
        let b = default_basis();
        let f = b
            .functions
            .iter()
            .find(|f| (f.p, f.q) == (0, 2))
            .unwrap();
        let root = 3.8317059702075125;
        let direct = f.norm_const
            * specfun::bessel_j(0, Complex64::new(root, 0.0)).unwrap().re;
        assert!((f.eval(1.0, 0.0).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn weyl_scaling_window() {
        // sigma_j / j stays inside a fixed window for the cosine family
        let b = default_basis();
        for (j, f) in b.functions.iter().enumerate().skip(4) {
            let ratio = f.sigma / (j + 1) as f64;
            assert!(
                (3.0..=16.0).contains(&ratio),
                "sigma_{}/{} = {ratio}",
                j + 1,
                j + 1
            );
        }
    }
}
