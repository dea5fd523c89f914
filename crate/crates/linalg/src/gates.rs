use crate::{qubit_count, DenseMatrix, LinalgError, Result, C64};

const UNITARY_TOL: f64 = 1e-10;

/// Applies a 2x2 or 4x4 unitary to `targets` and returns the new state.
///
/// For two-qubit gates the matrix index is `2*b(targets[0]) + b(targets[1])`,
/// i.e. the first target is the more significant factor of `kron(A, B)`.
pub fn apply_gate(state: &[C64], gate: &DenseMatrix, targets: &[usize]) -> Result<Vec<C64>> {
    let mut out = state.to_vec();
    apply_gate_to(&mut out, gate, targets)?;
    Ok(out)
}

/// In-place variant of [`apply_gate`] with full validation.
pub fn apply_gate_to(state: &mut [C64], gate: &DenseMatrix, targets: &[usize]) -> Result<()> {
    let n = qubit_count(state.len())
        .ok_or(LinalgError::DimensionMismatch { expected: state.len().next_power_of_two(), got: state.len() })?;
    let bad = || LinalgError::BadTargets { targets: targets.to_vec(), qubits: n };
    if targets.iter().any(|&t| t >= n) {
        return Err(bad());
    }
    let dev = gate.unitarity_deviation().ok_or(LinalgError::NotUnitary { deviation: f64::INFINITY })?;
    if dev > UNITARY_TOL {
        return Err(LinalgError::NotUnitary { deviation: dev });
    }
    match (targets, gate.rows()) {
        ([q], 2) => {
            let g = gate.as_slice();
            apply_1q(state, [g[0], g[1], g[2], g[3]], *q);
            Ok(())
        }
        ([q0, q1], 4) if q0 != q1 => {
            let mut g = [C64::new(0.0, 0.0); 16];
            g.copy_from_slice(gate.as_slice());
            apply_2q(state, &g, *q0, *q1);
            Ok(())
        }
        _ => Err(bad()),
    }
}

/// Unchecked single-qubit kernel; `g` is row-major.
pub fn apply_1q(state: &mut [C64], g: [C64; 4], q: usize) {
    let bit = 1usize << q;
    for i in 0..state.len() {
        if i & bit == 0 {
            let a = state[i];
            let b = state[i | bit];
            state[i] = g[0] * a + g[1] * b;
            state[i | bit] = g[2] * a + g[3] * b;
        }
    }
}

/// Unchecked two-qubit kernel; `q0` is the more significant gate index bit.
pub fn apply_2q(state: &mut [C64], g: &[C64; 16], q0: usize, q1: usize) {
    let b0 = 1usize << q0;
    let b1 = 1usize << q1;
    for i in 0..state.len() {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b1, i | b0, i | b0 | b1];
        let v = [state[idx[0]], state[idx[1]], state[idx[2]], state[idx[3]]];
        for r in 0..4 {
            let row = &g[4 * r..4 * r + 4];
            state[idx[r]] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// Multiplies each amplitude by the matching diagonal entry.
pub fn apply_diagonal(state: &mut [C64], diag: &[C64]) {
    for (s, d) in state.iter_mut().zip(diag) {
        *s *= d;
    }
}
