//! Assembly of the Galerkin pencil `(A, B)`.
//!
//! `A_ij = sigma_j delta_ij - k^2 int_D n phi_i phi_j dx`, where the
//! stiffness part collapses to the diagonal by the Neumann eigenvalue
//! identity and only the weighted mass term needs quadrature. The integral
//! is evaluated in polar form with a Gauss–Legendre radial rule (split at
//! the inclusion boundary so the integrand stays piecewise smooth) and a
//! periodic trapezoid angular rule. `B` is the boundary mass matrix, which
//! is analytic on the unit circle.

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{CMat, RealMat};
use crate::medium::MediumProfile;
use crate::par::map_indexed;
use crate::quadrature::{gauss_legendre, trapezoid_angles, trapezoid_weight};
use num_complex::Complex64;

/// Product rule resolving the disk: Gauss–Legendre in `r` (per segment),
/// periodic trapezoid in `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    /// Radial nodes per segment (>= 16).
    pub radial_points: usize,
    /// Angular nodes (>= 64).
    pub angular_points: usize,
    /// Split the radial interval at the inclusion boundary.
    pub split_at_interface: bool,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            radial_points: 64,
            angular_points: 256,
            split_at_interface: true,
        }
    }
}

impl QuadratureRule {
    pub fn validate(&self) -> Result<()> {
        if self.radial_points < 16 {
            return Err(Error::Config(format!(
                "radial_points must be >= 16, got {}",
                self.radial_points
            )));
        }
        if self.angular_points < 64 {
            return Err(Error::Config(format!(
                "angular_points must be >= 64, got {}",
                self.angular_points
            )));
        }
        Ok(())
    }
}

/// The assembled pencil together with its provenance.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    /// Complex symmetric stiffness-minus-weighted-mass matrix.
    pub a: CMat,
    /// Real symmetric PSD boundary mass matrix, block-diagonal over
    /// `(p, kind)` with rank-1 blocks.
    pub b: RealMat,
    pub k: f64,
    pub basis: BasisSet,
    pub medium: MediumProfile,
    pub quadrature: QuadratureRule,
}

/// Radial nodes, weights (including the polar `r` factor is left to the
/// caller) and the per-node basis values, node-major.
struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `table[node * n_basis + j] = radial_j(node)`
    table: Vec<f64>,
}

fn build_radial_grid(basis: &BasisSet, base: &(Vec<f64>, Vec<f64>), split: Option<f64>) -> RadialGrid {
    let segments: Vec<(f64, f64)> = match split {
        Some(s) => vec![(0.0, s), (s, 1.0)],
        None => vec![(0.0, 1.0)],
    };
    let per_seg = base.0.len();
    let mut nodes = Vec::with_capacity(per_seg * segments.len());
    let mut weights = Vec::with_capacity(per_seg * segments.len());
    for &(a, b) in &segments {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&x, &w) in base.0.iter().zip(&base.1) {
            nodes.push(mid + half * x);
            weights.push(w * half);
        }
    }
    let n = basis.len();
    let mut table = vec![0.0; nodes.len() * n];
    for (ni, &r) in nodes.iter().enumerate() {
        for (j, f) in basis.functions.iter().enumerate() {
            table[ni * n + j] = f.radial(r);
        }
    }
    RadialGrid { nodes, weights, table }
}

fn assemble_impl(
    basis: &BasisSet,
    medium: &MediumProfile,
    k: f64,
    quad: &QuadratureRule,
    parallel: bool,
) -> Result<GalerkinSystem> {
    quad.validate()?;
    if basis.is_empty() {
        return Err(Error::Config("cannot assemble with an empty basis".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Config(format!("wavenumber must be positive, got {k}")));
    }
    let n = basis.len();
    let n_theta = quad.angular_points;
    let thetas = trapezoid_angles(n_theta);
    let w_theta = trapezoid_weight(n_theta);
    let base_gl = gauss_legendre(quad.radial_points);

    // Radial grids: shared across theta unless the inclusion boundary varies.
    let split_radii: Vec<Option<f64>> = if quad.split_at_interface {
        thetas
            .iter()
            .map(|&t| {
                let rho = medium.boundary_radius(t)?;
                if let Some(r) = rho {
                    if !(r > 0.0 && r < 1.0) {
                        return Err(Error::Config(format!(
                            "inclusion boundary rho({t}) = {r} leaves (0, 1); \
                             cannot split the radial rule"
                        )));
                    }
                }
                Ok(rho)
            })
            .collect::<Result<_>>()?
    } else {
        vec![None; n_theta]
    };
    let theta_dependent = split_radii.windows(2).any(|w| w[0] != w[1]);
    let uniform_grid = if theta_dependent {
        None
    } else {
        Some(build_radial_grid(basis, &base_gl, split_radii[0]))
    };
    let per_theta_grids: Vec<RadialGrid> = if theta_dependent {
        map_indexed(n_theta, parallel, |t| {
            build_radial_grid(basis, &base_gl, split_radii[t])
        })
    } else {
        Vec::new()
    };
    let grid_for = |t: usize| -> &RadialGrid {
        uniform_grid.as_ref().unwrap_or_else(|| &per_theta_grids[t])
    };

    // n(r, theta) times the radial weight and polar factor, per node.
    let mass_weights: Vec<Vec<Complex64>> = {
        let results = map_indexed(n_theta, parallel, |t| -> Result<Vec<Complex64>> {
            let grid = grid_for(t);
            let theta = thetas[t];
            grid.nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&r, &w)| Ok(medium.eval(r, theta)? * (w * r)))
                .collect()
        });
        results.into_iter().collect::<Result<_>>()?
    };

    // angular values, theta-major
    let angular: Vec<Vec<f64>> = thetas
        .iter()
        .map(|&t| basis.functions.iter().map(|f| f.angular(t)).collect())
        .collect();

    // weighted mass entries Q_ij for i <= j; the (i, j) and (j, i) quadrature
    // loops would be flop-for-flop identical, so the mirrored entry is exact
    // and A = A^T holds by construction
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let n_pairs = pairs.len();
    let q_entries: Vec<Complex64> = map_indexed(n_pairs, parallel, |pi| {
        let (i, j) = pairs[pi];
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..n_theta {
            let grid = grid_for(t);
            let weights = &mass_weights[t];
            let mut radial_sum = Complex64::new(0.0, 0.0);
            for node in 0..grid.nodes.len() {
                let prod = grid.table[node * n + i] * grid.table[node * n + j];
                radial_sum += weights[node] * prod;
            }
            acc += radial_sum * (angular[t][i] * angular[t][j]);
        }
        acc * w_theta
    });

    let ksq = k * k;
    let mut a = CMat::zeros(n, n);
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let mass = -ksq * q_entries[pi];
        a[(i, j)] = mass;
        a[(j, i)] = mass;
    }
    for (j, f) in basis.functions.iter().enumerate() {
        let upd = a.get(j, j) + f.sigma;
        a[(j, j)] = upd;
    }
    let b = boundary_mass_analytic(basis);
    Ok(GalerkinSystem {
        a,
        b,
        k,
        basis: basis.clone(),
        medium: medium.clone(),
        quadrature: *quad,
    })
}

/// Assemble the pencil; fans out over a rayon pool when the `parallel`
/// feature is enabled. Bit-identical to [`assemble_serial`].
pub fn assemble(
    basis: &BasisSet,
    medium: &MediumProfile,
    k: f64,
    quad: &QuadratureRule,
) -> Result<GalerkinSystem> {
    assemble_impl(basis, medium, k, quad, true)
}

/// Sequential assembly, kept callable regardless of features for equivalence
/// checks and benchmarks.
pub fn assemble_serial(
    basis: &BasisSet,
    medium: &MediumProfile,
    k: f64,
    quad: &QuadratureRule,
) -> Result<GalerkinSystem> {
    assemble_impl(basis, medium, k, quad, false)
}

/// Boundary mass matrix on the unit circle: angular orthogonality makes it
/// block-diagonal, `B_ij = c_p t_i t_j` within a `(p, kind)` block where `t`
/// is the boundary trace coefficient and `c_p` is `2 pi` for `p = 0`, `pi`
/// otherwise.
pub fn boundary_mass_analytic(basis: &BasisSet) -> RealMat {
    let n = basis.len();
    let mut b = RealMat::zeros(n);
    for i in 0..n {
        let fi = &basis.functions[i];
        for j in i..n {
            let fj = &basis.functions[j];
            if fi.p == fj.p && fi.kind == fj.kind {
                let v = fi.angular_factor()
                    * fi.boundary_trace_coefficient()
                    * fj.boundary_trace_coefficient();
                b.set(i, j, v);
                b.set(j, i, v);
            }
        }
    }
    b
}
