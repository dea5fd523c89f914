//! Dense complex linear algebra for desk-scale quantum simulation.
//!
//! Matrices are row-major [`DenseMatrix`] values, states are plain
//! `Vec<C64>` amplitude vectors. Qubit 0 is the least significant bit of an
//! amplitude index everywhere in this workspace.

mod eigh;
mod gates;
mod matrix;
mod operator;
mod vector;

pub use eigh::{eigh, eigh_with, EighOptions, SpectralDecomposition};
pub use gates::{apply_1q, apply_2q, apply_diagonal, apply_gate, apply_gate_to};
pub use matrix::{kron, paulis, DenseMatrix};
pub use num_complex::Complex64 as C64;
pub use operator::HermitianOperator;
pub use vector::{fidelity, inner, norm, normalize, normalized};

use thiserror::Error;

/// Errors raised by the linear algebra layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gate is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("bad gate targets {targets:?} for a {qubits}-qubit register")]
    BadTargets { targets: Vec<usize>, qubits: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Exact time evolution `e^{-iHt}|state>` through a cached eigendecomposition.
pub fn evolve_exact(decomp: &SpectralDecomposition, t: f64, state: &[C64]) -> Result<Vec<C64>> {
    decomp.apply_function(state, |lambda| C64::from_polar(1.0, -lambda * t))
}

/// Number of qubits of a register of the given dimension, if it is a power of two.
pub fn qubit_count(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
