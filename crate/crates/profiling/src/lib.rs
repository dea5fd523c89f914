//! Spectrum profiling: the cumulative distribution function (CDF) of a state
//! with respect to a Hamiltonian, reconstructed from Fourier moments
//! `<psi| e^{-ikH} |psi>`, and new spectrum bounds read off its derivatives.
//!
//! The Hamiltonian is first rescaled so that the prior bounds map onto
//! `(-1, 1)`; all profile grids live in that `x` coordinate.

mod bessel;
mod cdf;
mod fourier;
mod moments;

pub use bessel::bessel_i;
pub use cdf::{
    build_cdf, differentiate, differentiate_analytic, extract_bounds, extract_bounds_relaxed, CdfProfile, Extraction,
    DEFAULT_GRID,
};
pub use fourier::{fourier_coefficients, FourierCoefficients};
pub use moments::{acquire_moments, odd_orders, shots_per_part, MomentMode};

use affqetu_circuit::CircuitError;
use affqetu_hamiltonian::{HamiltonianError, SpectrumBounds};
use affqetu_linalg::{HermitianOperator, LinalgError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfilingError {
    #[error("invalid profiling parameters: {0}")]
    BadParameters(String),
    #[error("no grid interval with C' > {xi1} and |C''| < {xi2}")]
    NoQualifyingInterval { xi1: f64, xi2: f64 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ProfilingError>;

/// `(2 / Lambda) (H - lb) - 1`, which maps `[lb, ub]` onto `[-1, 1]`.
pub fn rescale_for_profiling(h: &HermitianOperator, bounds: &SpectrumBounds) -> Result<HermitianOperator> {
    bounds.validate()?;
    Ok(h.affine(2.0 / bounds.width(), bounds.lambda_lb + 0.5 * bounds.width()))
}

/// Profile coordinate of energy `lambda`.
pub fn to_x(bounds: &SpectrumBounds, lambda: f64) -> f64 {
    2.0 * (lambda - bounds.lambda_lb) / bounds.width() - 1.0
}

/// Energy of profile coordinate `x`: `(Lambda / 2)(x + 2 lb / Lambda + 1)`.
pub fn from_x(bounds: &SpectrumBounds, x: f64) -> f64 {
    0.5 * bounds.width() * (x + 2.0 * bounds.lambda_lb / bounds.width() + 1.0)
}
