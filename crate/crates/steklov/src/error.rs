use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the supported domain of a special function or evaluator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (basis truncation, quadrature sizes, degenerate geometry, ...).
    #[error("config error: {0}")]
    Config(String),

    /// Expression syntax error; `offset` is the 1-based byte offset of the
    /// first invalid token.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Expression evaluated to something unusable (division by ~0, ...).
    #[error("evaluation error at (r={r}, theta={theta}): {message}")]
    Eval { message: String, r: f64, theta: f64 },

    /// The pencil matrix A is numerically singular: the wavenumber sits too
    /// close to an interior Dirichlet/Neumann eigenvalue.
    #[error("wavenumber near interior eigenvalue: cond(A) estimate {cond:.3e}")]
    NearSingular { cond: f64 },

    /// Dense eigensolver or linear solve failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Root bracketing failed: the target is outside the achievable range.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// Operation not defined for the given profile kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Internal invariant violated (scan bound exhausted, ...). A bug if seen.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
