use affqetu_filter::{qsp_amplitude, QspPhases};
use affqetu_linalg::{normalize, paulis, HermitianOperator, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::trajectories::{self, binomial, shot_rng, DEFAULT_MAX_TRAJECTORIES};
use crate::{with_ancilla, CircuitError, Gate, GateList, NoiseModel, Result, ShotBudget};

#[derive(Clone, Copy, Debug)]
pub enum QetuBackend<'a> {
    /// Applies `F(cos(H~/2))` through the eigendecomposition of `h_t`.
    Exact { h_t: &'a HermitianOperator },
    /// Alternates `cU^dag` and `cU` given as a controlled circuit on `ancilla`.
    Trotter { cu: &'a GateList, ancilla: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecOptions {
    /// Noise trajectories per run; shots are spread over them round-robin.
    pub max_trajectories: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self { max_trajectories: DEFAULT_MAX_TRAJECTORIES }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PostSelectionResult {
    /// Post-selected, renormalized system state.
    pub state: Vec<C64>,
    /// Measured success rate `accepted / attempted` (exact probability in exact mode).
    pub success_probability: f64,
    pub accepted_shots: u64,
    pub attempted_shots: u64,
    /// Success probability averaged over trajectories, before shot noise.
    pub expected_success: f64,
}

pub fn qetu_execute(
    state: &[C64],
    phases: &QspPhases,
    backend: QetuBackend<'_>,
    noise: &NoiseModel,
    shots: &ShotBudget,
) -> Result<PostSelectionResult> {
    qetu_execute_with(state, phases, backend, noise, shots, &ExecOptions::default())
}

pub fn qetu_execute_with(
    state: &[C64],
    phases: &QspPhases,
    backend: QetuBackend<'_>,
    noise: &NoiseModel,
    shots: &ShotBudget,
    opts: &ExecOptions,
) -> Result<PostSelectionResult> {
    ShotBudget::new(shots.total_shots, shots.rng_seed)?;
    noise.validate()?;
    match backend {
        QetuBackend::Exact { h_t } => exact(state, phases, h_t, noise, shots),
        QetuBackend::Trotter { cu, ancilla } => trotter(state, phases, cu, ancilla, noise, shots, opts),
    }
}

fn exact(
    state: &[C64],
    phases: &QspPhases,
    h_t: &HermitianOperator,
    noise: &NoiseModel,
    shots: &ShotBudget,
) -> Result<PostSelectionResult> {
    if !noise.is_noiseless() {
        return Err(CircuitError::NoiseInExactMode { p2: noise.p2, p1: noise.p1 });
    }
    let decomp = h_t.decomposition()?;
    let mut out = decomp.apply_function(state, |lt| qsp_amplitude(phases, (0.5 * lt).cos()))?;
    let p = normalize(&mut out).powi(2);
    let accepted = binomial(shots.total_shots, p, &mut shot_rng(shots.rng_seed));
    if accepted == 0 {
        return Err(CircuitError::NoAcceptedShots { attempted: shots.total_shots });
    }
    Ok(PostSelectionResult {
        state: out,
        success_probability: p,
        accepted_shots: accepted,
        attempted_shots: shots.total_shots,
        expected_success: p,
    })
}

/// The full QETU sequence `e^{i phi_0 X} cU^dag e^{i phi_1 X} cU ...` as one circuit.
pub fn qetu_circuit(phases: &QspPhases, cu: &GateList, ancilla: usize) -> Result<GateList> {
    let cu_dag = cu.inverse();
    let mut gl = GateList::new(cu.n_qubits);
    for (k, &phi) in phases.phases.iter().enumerate() {
        if k > 0 {
            gl.extend(if k % 2 == 1 { &cu_dag } else { cu })?;
        }
        gl.push(Gate::one(&paulis::exp_ix(phi), ancilla)?)?;
    }
    Ok(gl)
}

fn trotter(
    state: &[C64],
    phases: &QspPhases,
    cu: &GateList,
    ancilla: usize,
    noise: &NoiseModel,
    shots: &ShotBudget,
    opts: &ExecOptions,
) -> Result<PostSelectionResult> {
    if ancilla >= cu.n_qubits || state.len() << 1 != 1usize << cu.n_qubits {
        return Err(CircuitError::BadCircuit(format!(
            "system state of length {} does not fit a {}-qubit controlled circuit with ancilla {ancilla}",
            state.len(),
            cu.n_qubits
        )));
    }
    let circuit = qetu_circuit(phases, cu, ancilla)?;
    let mut init = vec![C64::new(0.0, 0.0); 1 << cu.n_qubits];
    for (s, a) in state.iter().enumerate() {
        init[with_ancilla(s, ancilla, 0)] = *a;
    }
    let n = (shots.total_shots as usize).clamp(1, opts.max_trajectories.max(1));
    let trajs = trajectories::run(&init, &circuit, noise, shots.rng_seed, n, ancilla)?;
    let mut rng = shot_rng(shots.rng_seed);
    let counts = trajectories::sample_counts(&trajs, shots.total_shots, &mut rng);
    let accepted: u64 = counts.iter().sum();
    if accepted == 0 {
        return Err(CircuitError::NoAcceptedShots { attempted: shots.total_shots });
    }
    let mut pick = rng.gen_range(0..accepted);
    let chosen = counts
        .iter()
        .position(|&c| {
            if pick < c {
                true
            } else {
                pick -= c;
                false
            }
        })
        .expect("pick is below the accepted total");
    let full = &trajs[chosen].state;
    let mut out: Vec<C64> = (0..state.len()).map(|s| full[with_ancilla(s, ancilla, 0)]).collect();
    normalize(&mut out);
    Ok(PostSelectionResult {
        state: out,
        success_probability: accepted as f64 / shots.total_shots as f64,
        accepted_shots: accepted,
        attempted_shots: shots.total_shots,
        expected_success: trajs.iter().map(|t| t.p0).sum::<f64>() / trajs.len() as f64,
    })
}
