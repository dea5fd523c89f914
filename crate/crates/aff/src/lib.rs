//! Adaptive finer filtering (AFF) for ground-state preparation.
//!
//! Each stage applies a QETU step filter with the current spectrum bounds and
//! cutoff, then profiles the filtered state's spectral CDF to shrink the
//! bounds ("stretching" the Hamiltonian) and picks the next cutoff from the
//! division coefficients `m_i`. A static baseline repeats the first stage
//! without profiling. Metrics follow the usual definitions of relative
//! amplification, maximal and total simulation time and circuit depth.

mod config;
mod metrics;
mod run;
pub mod theory;

pub use config::{default_divisions, AffConfig, ExecMode};
pub use metrics::{relative_amplification, time_metrics, Amplification};
pub use run::{
    ground_overlap, haar_state, run_aff, run_aff_with, run_static, run_static_with, stage_phases, FilterSource,
    RunReport, StageKind, StageReport,
};

use affqetu_circuit::CircuitError;
use affqetu_filter::FilterError;
use affqetu_hamiltonian::HamiltonianError;
use affqetu_linalg::LinalgError;
use affqetu_profiling::ProfilingError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AffError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("eigenvalue {lambda} lies outside the initial bounds ({lb}, {ub})")]
    InitialOutOfBounds { lambda: f64, lb: f64, ub: f64 },
    #[error("stage {stage}: no accepted shots out of {attempted}")]
    NoAcceptedShots { stage: usize, attempted: u64 },
    #[error("stage {stage}: profiling failed: {source}")]
    ProfilingFailed { stage: usize, source: ProfilingError },
    #[error("stage {stage}: ground overlap fell from {before} to {after}; the cutoff overshoots a0")]
    Overfiltering { stage: usize, before: f64, after: f64 },
    #[error("stage {stage}: success probability {p} collapsed below 1e-4")]
    SuccessCollapse { stage: usize, p: f64 },
    #[error("initial state has no weight in the ground or first excited subspace")]
    ZeroInitialOverlap,
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Profiling(#[from] ProfilingError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, AffError>;
