//! Gate-level statevector simulation for QETU filtering and Hadamard tests.
//!
//! Circuits are flat [`GateList`]s of one- and two-qubit unitaries. Noise is
//! Monte-Carlo depolarizing: after every gate a random non-identity Pauli on
//! its targets is inserted with the gate's error probability.

mod gates;
mod hadamard;
mod noise;
mod qetu;
mod trajectories;
mod trotter;

pub use gates::{Gate, GateList};
pub use hadamard::{hadamard_circuit, hadamard_circuit_at, hadamard_test, hadamard_test_at, HadamardMode, Part};
pub use noise::{apply_noisy, trajectory_rng, NoiseModel};
pub use qetu::{qetu_circuit, qetu_execute, qetu_execute_with, ExecOptions, PostSelectionResult, QetuBackend};
pub use trajectories::DEFAULT_MAX_TRAJECTORIES;
pub use trotter::{trotter_circuit, trotter_circuit_with, TrotterOptions, TrotterOrder};

use affqetu_hamiltonian::HamiltonianError;
use affqetu_linalg::LinalgError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("no shot post-selected the ancilla in |0> ({attempted} attempts)")]
    NoAcceptedShots { attempted: u64 },
    #[error("exact mode does not support noise (p2 = {p2}, p1 = {p1})")]
    NoiseInExactMode { p2: f64, p1: f64 },
    #[error("invalid noise model: {0}")]
    BadNoise(String),
    #[error("invalid shot budget: {0}")]
    BadShots(String),
    #[error("invalid circuit: {0}")]
    BadCircuit(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBudget {
    pub total_shots: u64,
    pub rng_seed: u64,
}

impl ShotBudget {
    pub fn new(total_shots: u64, rng_seed: u64) -> Result<Self> {
        if total_shots == 0 {
            return Err(CircuitError::BadShots("total_shots must be at least 1".into()));
        }
        Ok(Self { total_shots, rng_seed })
    }
}

/// Full-register index of system basis state `s` with the ancilla bit set to `bit`.
pub fn with_ancilla(s: usize, ancilla: usize, bit: usize) -> usize {
    let low = s & ((1 << ancilla) - 1);
    let high = (s >> ancilla) << (ancilla + 1);
    high | (bit << ancilla) | low
}
