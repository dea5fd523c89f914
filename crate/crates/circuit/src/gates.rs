use affqetu_linalg::{apply_1q, apply_2q, qubit_count, DenseMatrix, C64};

use crate::{CircuitError, Result};

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    One {
        u: [C64; 4],
        q: usize,
    },
    /// Matrix index `2 * b(q0) + b(q1)`.
    Two {
        u: [C64; 16],
        q0: usize,
        q1: usize,
    },
}

impl Gate {
    pub fn one(u: &DenseMatrix, q: usize) -> Result<Self> {
        check_unitary(u, 2)?;
        let s = u.as_slice();
        Ok(Gate::One { u: [s[0], s[1], s[2], s[3]], q })
    }

    pub fn two(u: &DenseMatrix, q0: usize, q1: usize) -> Result<Self> {
        check_unitary(u, 4)?;
        if q0 == q1 {
            return Err(CircuitError::BadCircuit(format!("repeated target {q0}")));
        }
        let mut m = [C64::new(0.0, 0.0); 16];
        m.copy_from_slice(u.as_slice());
        Ok(Gate::Two { u: m, q0, q1 })
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Two { .. })
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::One { q, .. } => vec![*q],
            Gate::Two { q0, q1, .. } => vec![*q0, *q1],
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Gate::One { u, q } => Gate::One { u: [u[0].conj(), u[2].conj(), u[1].conj(), u[3].conj()], q: *q },
            Gate::Two { u, q0, q1 } => {
                let mut a = [C64::new(0.0, 0.0); 16];
                for i in 0..4 {
                    for j in 0..4 {
                        a[4 * i + j] = u[4 * j + i].conj();
                    }
                }
                Gate::Two { u: a, q0: *q0, q1: *q1 }
            }
        }
    }

    pub fn apply(&self, state: &mut [C64]) {
        match self {
            Gate::One { u, q } => apply_1q(state, *u, *q),
            Gate::Two { u, q0, q1 } => apply_2q(state, u, *q0, *q1),
        }
    }
}

fn check_unitary(u: &DenseMatrix, dim: usize) -> Result<()> {
    if u.rows() != dim || u.cols() != dim {
        return Err(CircuitError::BadCircuit(format!("expected a {dim}x{dim} gate, got {}x{}", u.rows(), u.cols())));
    }
    let dev = u.unitarity_deviation().unwrap_or(f64::INFINITY);
    if dev > UNITARY_TOL {
        return Err(CircuitError::BadCircuit(format!("gate is not unitary (deviation {dev:e})")));
    }
    Ok(())
}

/// Ordered gate sequence on `n_qubits`, with a global phase `e^{i global_phase}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateList {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub global_phase: f64,
}

impl GateList {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), global_phase: 0.0 }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&t) = gate.targets().iter().find(|&&t| t >= self.n_qubits) {
            return Err(CircuitError::BadCircuit(format!("target {t} outside a {}-qubit register", self.n_qubits)));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateList) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn single_qubit_count(&self) -> usize {
        self.len() - self.two_qubit_count()
    }

    /// Gate list of the adjoint circuit.
    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            global_phase: -self.global_phase,
        }
    }

    pub fn check_state(&self, state: &[C64]) -> Result<()> {
        match qubit_count(state.len()) {
            Some(n) if n == self.n_qubits => Ok(()),
            _ => Err(CircuitError::BadCircuit(format!(
                "state of length {} does not fit a {}-qubit circuit",
                state.len(),
                self.n_qubits
            ))),
        }
    }

    /// Noiseless in-place application.
    pub fn apply(&self, state: &mut [C64]) -> Result<()> {
        self.check_state(state)?;
        for g in &self.gates {
            g.apply(state);
        }
        self.apply_global_phase(state);
        Ok(())
    }

    pub(crate) fn apply_global_phase(&self, state: &mut [C64]) {
        if self.global_phase != 0.0 {
            let ph = C64::from_polar(1.0, self.global_phase);
            state.iter_mut().for_each(|a| *a *= ph);
        }
    }

    /// Dense unitary of the circuit, for tests on small registers.
    pub fn to_matrix(&self) -> DenseMatrix {
        let n = 1usize << self.n_qubits;
        let mut m = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            self.apply(&mut e).expect("basis vector fits the register");
            for (i, v) in e.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}
