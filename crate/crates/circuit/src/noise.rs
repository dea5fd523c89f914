use affqetu_linalg::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{CircuitError, Gate, GateList, Result};

/// Depolarizing error probabilities per gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p2: f64,
    pub p1: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    /// `p1 = p2 / 10`.
    pub fn new(p2: f64) -> Result<Self> {
        Self::with_p1(p2, p2 / 10.0)
    }

    pub fn with_p1(p2: f64, p1: f64) -> Result<Self> {
        let m = Self { p2, p1 };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        Self { p2: 0.0, p1: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.1).contains(&self.p2) {
            return Err(CircuitError::BadNoise(format!("p2 = {} outside [0, 0.1]", self.p2)));
        }
        if !(0.0..=1.0).contains(&self.p1) {
            return Err(CircuitError::BadNoise(format!("p1 = {} outside [0, 1]", self.p1)));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p2 == 0.0 && self.p1 == 0.0
    }
}

/// Deterministic generator for trajectory `index` of a run seeded with `base`.
pub fn trajectory_rng(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base ^ index)
}

/// One Monte-Carlo trajectory of `gates` applied to `state`.
pub fn apply_noisy<R: Rng + ?Sized>(
    state: &[C64],
    gates: &GateList,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Vec<C64>> {
    let mut out = state.to_vec();
    apply_noisy_in_place(&mut out, gates, noise, rng)?;
    Ok(out)
}

pub(crate) fn apply_noisy_in_place<R: Rng + ?Sized>(
    state: &mut [C64],
    gates: &GateList,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    gates.check_state(state)?;
    let errors = sample_errors(gates, noise, rng);
    apply_with_errors(state, gates, &errors);
    Ok(())
}

/// Pauli insertion after gate `gate`: codes `p0, p1` in `0..4` on its targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ErrorEvent {
    pub gate: usize,
    pub paulis: [usize; 2],
}

/// Draws the error locations of one trajectory, in gate order.
pub(crate) fn sample_errors<R: Rng + ?Sized>(gates: &GateList, noise: &NoiseModel, rng: &mut R) -> Vec<ErrorEvent> {
    let mut out = Vec::new();
    for (idx, g) in gates.gates.iter().enumerate() {
        match g {
            Gate::Two { .. } if noise.p2 > 0.0 => {
                if rng.gen::<f64>() < noise.p2 {
                    let k = rng.gen_range(1..16);
                    out.push(ErrorEvent { gate: idx, paulis: [k / 4, k % 4] });
                }
            }
            Gate::One { .. } if noise.p1 > 0.0 => {
                if rng.gen::<f64>() < noise.p1 {
                    out.push(ErrorEvent { gate: idx, paulis: [rng.gen_range(1..4), 0] });
                }
            }
            _ => {}
        }
    }
    out
}

pub(crate) fn apply_with_errors(state: &mut [C64], gates: &GateList, errors: &[ErrorEvent]) {
    let mut next = errors.iter().peekable();
    for (idx, g) in gates.gates.iter().enumerate() {
        g.apply(state);
        while let Some(e) = next.next_if(|e| e.gate == idx) {
            match g {
                Gate::One { q, .. } => apply_pauli(state, e.paulis[0], *q),
                Gate::Two { q0, q1, .. } => {
                    apply_pauli(state, e.paulis[0], *q0);
                    apply_pauli(state, e.paulis[1], *q1);
                }
            }
        }
    }
    gates.apply_global_phase(state);
}

/// Applies `I, X, Y, Z` for `p = 0, 1, 2, 3`.
fn apply_pauli(state: &mut [C64], p: usize, q: usize) {
    let bit = 1usize << q;
    let i = C64::new(0.0, 1.0);
    match p {
        1 => {
            for s in (0..state.len()).filter(|s| s & bit == 0) {
                state.swap(s, s | bit);
            }
        }
        2 => {
            for s in (0..state.len()).filter(|s| s & bit == 0) {
                let (a, b) = (state[s], state[s | bit]);
                state[s] = -i * b;
                state[s | bit] = i * a;
            }
        }
        3 => {
            for s in (0..state.len()).filter(|s| s & bit != 0) {
                state[s] = -state[s];
            }
        }
        _ => {}
    }
}
