//! Steklov eigenvalues of the Helmholtz scattering problem on the unit disk,
//! computed by a spectral Galerkin method over the Neumann eigenfunctions of
//! the Laplacian, with closed-form oracles and a refractive-index estimator
//! driven by the leading eigenvalue.
//!
//! The crate is organized bottom-up:
//!
//! - [`specfun`] — Bessel functions and the root tables of `J'_p`
//! - [`basis`] — the orthonormal Neumann eigenbasis of the disk
//! - [`medium`] — refractive-index profiles and the expression language
//! - [`assembly`] — quadrature assembly of the pencil matrices `(A, B)`
//! - [`eigensolve`] — the dense pencil solve and eigenfunction sampling
//! - [`oracles`] — separation-of-variables and asymptotic references
//! - [`inverse`] — constant-index estimation and the area correction
//! - [`harness`] — convergence and projection-rate studies, validation
//!
//! With the default `parallel` feature, matrix assembly and parameter sweeps
//! fan out over a rayon pool; results are bit-identical to the sequential
//! fallback because work is partitioned per output element and every
//! reduction keeps a fixed order.

mod dd;
mod error;

pub mod assembly;
pub mod basis;
pub mod eigensolve;
pub mod expr;
pub mod harness;
pub mod inverse;
pub mod linalg;
pub mod medium;
pub mod oracles;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};

/// Ordered map over `0..n`, parallel when requested and compiled in.
pub(crate) mod par {
    #[cfg(feature = "parallel")]
    use rayon::prelude::*;

    #[cfg(feature = "parallel")]
    pub fn map_indexed<U, F>(n: usize, parallel: bool, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        if parallel {
            (0..n).into_par_iter().map(f).collect()
        } else {
            (0..n).map(f).collect()
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map_indexed<U, F>(n: usize, _parallel: bool, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
