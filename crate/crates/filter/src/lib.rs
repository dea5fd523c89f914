//! Even step-function polynomials in the Chebyshev basis and the symmetric
//! QSP phase sequences that realize them in a QETU circuit.
//!
//! A [`StepPolynomial`] approximates `F(a) = 0` for `a < mu` and `F(a) = 1`
//! for `a > mu` on `[0, 1]`, extended evenly to `[-1, 1]`. [`find_phases`]
//! returns phases whose [`qsp_response`] reproduces it.

pub mod cache;
pub mod lp;
mod qsp;
mod step;

pub use qsp::{find_phases, find_phases_with, qsp_amplitude, qsp_response, PhaseOptions, QspPhases};
pub use step::{approximate_step, evaluate, StepPolynomial};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("invalid degree {0}: must be even and within the supported range")]
    BadDegree(usize),
    #[error("invalid band: cutoff {mu}, half-width {w}")]
    BadBand { mu: f64, w: f64 },
    #[error("step approximation residual {eps} exceeds 0.2")]
    InfeasibleBand { eps: f64 },
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("phase optimization failed: best residual {residual:e} after {attempts} attempts")]
    PhaseOptimizationFailed { residual: f64, attempts: usize },
    #[error("phases are not symmetric (deviation {0:e})")]
    AsymmetricPhases(f64),
    #[error("linear program failed: {0}")]
    LpFailed(String),
    #[error("cache format error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, FilterError>;
