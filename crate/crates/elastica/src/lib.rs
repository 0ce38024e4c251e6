//! Numerical laboratory for the free boundary elastic flow of open curves
//! whose endpoints slide along two parallel vertical lines.
//!
//! The library is organised bottom-up:
//!
//! * [`elliptic`] — complete/incomplete elliptic integrals and Jacobi
//!   elliptic functions (AGM and descending Landen transformations).
//! * [`variational`] — the five-branch quotient `Q(k)` behind the sharp
//!   curvature interpolation inequality, its maximiser, and the critical
//!   amplitude analysis.
//! * [`curves`] — generators for the initial data used by the experiments
//!   (near-critical wave curve, rectangular elastica, lemniscate,
//!   figure-eight) plus discrete-geometry utilities.
//! * [`fem`] — the semi-implicit finite-element scheme: one banded linear
//!   solve per time step for positions and the curvature vector field.
//! * [`diagnostics`] — discrete energies, length-evolution monitors,
//!   turning number, and shape comparison.
//! * [`stability`] — the quadratic form certifying linear instability of
//!   the rectangular elastica.
//! * [`io`] — snapshot and trace files.

pub mod curves;
pub mod diagnostics;
pub mod elliptic;
pub mod fem;
pub mod io;
pub mod stability;
pub mod variational;
mod vec2;

pub use vec2::Vec2;

/// Library-wide error type.
///
/// `Domain` marks invalid arguments (caller error), `Numerical` marks a
/// computation that started from valid inputs but failed to converge or
/// produced an unusable result.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
