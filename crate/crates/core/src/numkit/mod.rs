//! Small self-contained numerical kernel.
//!
//! Everything here works on tiny dense problems (dimension 2 or 4) or on
//! scalar functions. The routines are deterministic and allocation-light so
//! they can be called from parallel sweeps without coordination.

mod elliptic;
mod fit;
mod linalg;
mod minimize;
mod ode;
mod quad;
mod roots;

pub use elliptic::complete_elliptic_e;
pub use fit::{fit_power_law, FitResult};
pub use linalg::{eig_hermitian, ComplexMatrix, HermitianEigen};
pub use minimize::{minimize_scalar, minimize_scalar_with, Minimum};
pub use ode::{integrate_ode, integrate_ode_sampled, OdeScalar, Tolerances};
pub use quad::{integrate, integrate_with};
pub use roots::find_root_bracketed;

/// Complex scalar used throughout the crate.
pub use num_complex::Complex64 as C64;

use thiserror::Error;

/// Failures reported by the numerical kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite value encountered at t = {t:e}")]
    NonFinite { t: f64 },
    #[error("invalid integration interval [{t0}, {t1}]")]
    BadInterval { t0: f64, t1: f64 },
    #[error("tolerances must be positive (rel = {rel:e}, abs = {abs:e})")]
    BadTolerance { rel: f64, abs: f64 },
    #[error("no sign change on [{a}, {b}]: g(a) = {ga:e}, g(b) = {gb:e}")]
    NoSignChange { a: f64, b: f64, ga: f64, gb: f64 },
    #[error("need at least {need} points for a fit, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("power-law fit requires strictly positive data, got ({t}, {d})")]
    NonPositive { t: f64, d: f64 },
    #[error("elliptic parameter m = {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("quadrature failed to converge on [{a}, {b}] (error estimate {err:e})")]
    QuadratureFailed { a: f64, b: f64, err: f64 },
}
