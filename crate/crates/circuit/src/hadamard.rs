use affqetu_hamiltonian::{SpectrumBounds, TfimParams};
use affqetu_linalg::{inner, paulis, HermitianOperator, C64};
use serde::{Deserialize, Serialize};

use crate::trajectories::{self, binomial, shot_rng, DEFAULT_MAX_TRAJECTORIES};
use crate::{
    trotter_circuit_with, with_ancilla, CircuitError, Gate, GateList, NoiseModel, Result, ShotBudget, TrotterOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Copy, Debug)]
pub enum HadamardMode<'a> {
    /// Exact value of the requested part; shots are ignored.
    Exact,
    /// Binomial ancilla statistics drawn from the exact outcome probability.
    Sampled,
    /// Gate-level circuit with a Trotterized controlled evolution; ancilla is qubit `L`.
    Trotter { params: &'a TfimParams, bounds: &'a SpectrumBounds, options: TrotterOptions, max_trajectories: usize },
}

impl<'a> HadamardMode<'a> {
    pub fn trotter(params: &'a TfimParams, bounds: &'a SpectrumBounds, options: TrotterOptions) -> Self {
        HadamardMode::Trotter { params, bounds, options, max_trajectories: DEFAULT_MAX_TRAJECTORIES }
    }
}

/// Estimates `Re` or `Im` of `<psi| e^{-i k H~} |psi>`.
///
/// In trotter mode the evolution is built from the TFIM parameters and bounds
/// carried by the mode, and `h_t` is unused.
pub fn hadamard_test(
    state: &[C64],
    h_t: &HermitianOperator,
    k: u32,
    part: Part,
    shots: &ShotBudget,
    noise: &NoiseModel,
    mode: HadamardMode<'_>,
) -> Result<f64> {
    hadamard_test_at(state, h_t, k as f64, part, shots, noise, mode)
}

/// [`hadamard_test`] at a real evolution time `t >= 0`.
pub fn hadamard_test_at(
    state: &[C64],
    h_t: &HermitianOperator,
    t: f64,
    part: Part,
    shots: &ShotBudget,
    noise: &NoiseModel,
    mode: HadamardMode<'_>,
) -> Result<f64> {
    noise.validate()?;
    ShotBudget::new(shots.total_shots, shots.rng_seed)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CircuitError::BadCircuit(format!("evolution time {t} must be finite and non-negative")));
    }
    let exact = || -> Result<f64> {
        if t == 0.0 {
            return Ok(if part == Part::Re { 1.0 } else { 0.0 });
        }
        let decomp = h_t.decomposition()?;
        let evolved = decomp.apply_function(state, |l| C64::from_polar(1.0, -t * l))?;
        let z = inner(state, &evolved);
        Ok(match part {
            Part::Re => z.re,
            Part::Im => z.im,
        })
    };
    match mode {
        HadamardMode::Exact | HadamardMode::Sampled if !noise.is_noiseless() => {
            Err(CircuitError::NoiseInExactMode { p2: noise.p2, p1: noise.p1 })
        }
        HadamardMode::Exact => exact(),
        HadamardMode::Sampled => {
            let p0 = 0.5 * (1.0 + exact()?);
            let n0 = binomial(shots.total_shots, p0, &mut shot_rng(shots.rng_seed));
            Ok(2.0 * n0 as f64 / shots.total_shots as f64 - 1.0)
        }
        HadamardMode::Trotter { params, bounds, options, max_trajectories } => {
            let l = params.l;
            if state.len() != 1 << l {
                return Err(CircuitError::BadCircuit(format!("state of length {} for L = {l}", state.len())));
            }
            let circuit = hadamard_circuit_at(params, bounds, t, part, &options)?;
            let mut init = vec![C64::new(0.0, 0.0); 1 << (l + 1)];
            for (s, a) in state.iter().enumerate() {
                init[with_ancilla(s, l, 0)] = *a;
            }
            let n = (shots.total_shots as usize).clamp(1, max_trajectories.max(1));
            let trajs = trajectories::run(&init, &circuit, noise, shots.rng_seed, n, l)?;
            let counts = trajectories::sample_counts(&trajs, shots.total_shots, &mut shot_rng(shots.rng_seed));
            let n0: u64 = counts.iter().sum();
            Ok(2.0 * n0 as f64 / shots.total_shots as f64 - 1.0)
        }
    }
}

/// `H . [S^dag] . c-e^{-i k H~} . H` on ancilla `L`.
pub fn hadamard_circuit(
    params: &TfimParams,
    bounds: &SpectrumBounds,
    k: u32,
    part: Part,
    options: &TrotterOptions,
) -> Result<GateList> {
    hadamard_circuit_at(params, bounds, k as f64, part, options)
}

/// [`hadamard_circuit`] at a real evolution time `t`.
pub fn hadamard_circuit_at(
    params: &TfimParams,
    bounds: &SpectrumBounds,
    t: f64,
    part: Part,
    options: &TrotterOptions,
) -> Result<GateList> {
    let l = params.l;
    let mut gl = GateList::new(l + 1);
    gl.push(Gate::one(&paulis::h(), l)?)?;
    if t != 0.0 {
        gl.extend(&trotter_circuit_with(params, bounds, t, true, l, options)?)?;
    }
    if part == Part::Im {
        gl.push(Gate::one(&paulis::s_dag(), l)?)?;
    }
    gl.push(Gate::one(&paulis::h(), l)?)?;
    Ok(gl)
}
