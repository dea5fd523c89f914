//! Ground-state energy estimation on a prepared state.
//!
//! Three estimators share one Hadamard-test backend: direct expectation
//! measurement of the TFIM terms ([`dem_energy`]), robust phase estimation
//! ([`rpe_estimate`]) and quantum complex exponential least squares
//! ([`qcels_estimate`]). Energies are reported in the units of `H`; evolution
//! times are applied to `s H`, where `s` is the configured `time_scale`.

mod dem;
mod moments;
mod qcels;
mod rpe;

pub use dem::{dem_energy, dem_energy_ensemble, dem_exact, dem_variance};
pub use moments::{Ensemble, EstimatorMode};
pub use qcels::{qcels_estimate, qcels_estimate_ensemble, qcels_fit, qcels_objective, QcelsConfig};
pub use rpe::{rpe_estimate, rpe_estimate_ensemble, rpe_update, RpeConfig};

use affqetu_circuit::CircuitError;
use affqetu_hamiltonian::HamiltonianError;
use affqetu_linalg::LinalgError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("invalid estimator configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, EstimatorError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dem,
    Rpe,
    Qcels,
}

/// Outcome of one estimator run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub method: Method,
    pub value: f64,
    /// Per-stage estimates, in the units of `H`.
    pub stages: Vec<f64>,
    /// Ancilla (or register) shots spent; zero for exact moments.
    pub shots: u64,
    /// Largest evolution time applied to `s H`.
    pub t_max: f64,
}
