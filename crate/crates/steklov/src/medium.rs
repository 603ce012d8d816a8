//! Refractive-index profiles `n(r, theta)` on the unit disk.
//!
//! A profile is constant, an inclusion (disk-shaped or with a polar-curve
//! boundary `rho(theta)`), or a free expression. Inclusions are closed: a
//! point with `r <= rho(theta)` takes the inner value. The inner value may
//! itself vary with position, which the variable-index scatterers need; the
//! background outside the inclusion is a constant, 1 by default.

use crate::error::{Error, Result};
use crate::expr::ExprAst;
use crate::quadrature::{trapezoid_angles, trapezoid_weight};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default background value outside a scatterer.
pub const BACKGROUND: Complex64 = Complex64::new(1.0, 0.0);

const AREA_NODES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum MediumProfile {
    /// `n(x) = value` on all of the disk (the scatterer fills the domain).
    Constant { value: Complex64 },
    /// `n = inner(r, theta)` for `r <= radius`, `outer` beyond.
    DiskInclusion {
        radius: f64,
        inner: ExprAst,
        outer: Complex64,
    },
    /// `n = inner(r, theta)` for `r <= rho(theta)`, `outer` beyond.
    PolarInclusion {
        rho: ExprAst,
        inner: ExprAst,
        outer: Complex64,
    },
    /// Free profile over `r`, `theta`, `x`, `y` with no inclusion geometry.
    Expression { ast: ExprAst },
}

impl MediumProfile {
    pub fn constant(value: Complex64) -> MediumProfile {
        MediumProfile::Constant { value }
    }

    pub fn disk_inclusion(radius: f64, inner: ExprAst, outer: Complex64) -> Result<MediumProfile> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Config(format!(
                "inclusion radius must lie in (0, 1), got {radius}"
            )));
        }
        Ok(MediumProfile::DiskInclusion { radius, inner, outer })
    }

    pub fn disk_inclusion_const(
        radius: f64,
        inner: Complex64,
        outer: Complex64,
    ) -> Result<MediumProfile> {
        Self::disk_inclusion(radius, ExprAst::constant(inner), outer)
    }

    pub fn polar_inclusion(rho: ExprAst, inner: ExprAst, outer: Complex64) -> MediumProfile {
        MediumProfile::PolarInclusion { rho, inner, outer }
    }

    pub fn expression(ast: ExprAst) -> MediumProfile {
        MediumProfile::Expression { ast }
    }

    /// Refractive index at polar coordinates `(r, theta)`.
    pub fn eval(&self, r: f64, theta: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!(
                "medium evaluation needs r in [0, 1], got {r}"
            )));
        }
        match self {
            MediumProfile::Constant { value } => Ok(*value),
            MediumProfile::DiskInclusion { radius, inner, outer } => {
                if r <= *radius {
                    inner.eval(r, theta)
                } else {
                    Ok(*outer)
                }
            }
            MediumProfile::PolarInclusion { rho, inner, outer } => {
                let boundary = rho.eval(0.0, theta)?.re;
                if r <= boundary {
                    inner.eval(r, theta)
                } else {
                    Ok(*outer)
                }
            }
            MediumProfile::Expression { ast } => ast.eval(r, theta),
        }
    }

    /// Radius of the inclusion boundary at `theta`, when the profile has one.
    pub fn boundary_radius(&self, theta: f64) -> Result<Option<f64>> {
        match self {
            MediumProfile::Constant { .. } | MediumProfile::Expression { .. } => Ok(None),
            MediumProfile::DiskInclusion { radius, .. } => Ok(Some(*radius)),
            MediumProfile::PolarInclusion { rho, .. } => Ok(Some(rho.eval(0.0, theta)?.re)),
        }
    }

    /// Area of the scatterer: `pi` for a full-disk profile, the polar area
    /// `1/2 int rho(theta)^2 dtheta` for inclusions. Undefined for free
    /// expressions.
    pub fn inclusion_area(&self) -> Result<f64> {
        match self {
            MediumProfile::Constant { .. } => Ok(PI),
            MediumProfile::DiskInclusion { .. } | MediumProfile::PolarInclusion { .. } => {
                let w = trapezoid_weight(AREA_NODES);
                let mut acc = 0.0;
                for theta in trapezoid_angles(AREA_NODES) {
                    let rho = self
                        .boundary_radius(theta)?
                        .expect("inclusion profiles have a boundary");
                    if !(rho > 0.0 && rho < 1.0) {
                        return Err(Error::Config(format!(
                            "inclusion boundary rho({theta}) = {rho} leaves (0, 1)"
                        )));
                    }
                    acc += 0.5 * rho * rho * w;
                }
                Ok(acc)
            }
            MediumProfile::Expression { .. } => Err(Error::Unsupported(
                "inclusion area is undefined for a free expression profile".into(),
            )),
        }
    }

    /// Sample the profile over a polar grid and reject non-physical values
    /// (`Re n <= 0` or `Im n < 0`).
    pub fn validate_physical(&self) -> Result<()> {
        for ir in 0..=24 {
            let r = ir as f64 / 24.0;
            for it in 0..48 {
                let theta = 2.0 * PI * it as f64 / 48.0;
                let n = self.eval(r, theta)?;
                if n.re <= 0.0 || n.im < 0.0 {
                    return Err(Error::Config(format!(
                        "refractive index {n} at (r={r:.4}, theta={theta:.4}) violates \
                         Re(n) > 0, Im(n) >= 0"
                    )));
                }
            }
        }
        Ok(())
    }
}
