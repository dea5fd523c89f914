use affqetu_circuit::{apply_noisy, Gate, GateList, NoiseModel, ShotBudget};
use affqetu_hamiltonian::{build_tfim, TfimParams};
use affqetu_linalg::{inner, paulis, C64};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Ensemble, EstimatorError, Result};

fn check_state(state: &[C64], params: &TfimParams) -> Result<()> {
    params.validate()?;
    if state.len() != params.dim() {
        return Err(EstimatorError::BadConfig(format!("state of length {} for L = {}", state.len(), params.l)));
    }
    Ok(())
}

/// Sum of `Z_a Z_b` over bonds for a Z-basis bitstring.
fn zz_value(params: &TfimParams, s: usize) -> f64 {
    params.bonds().iter().map(|&(a, b)| if ((s >> a) ^ (s >> b)) & 1 == 0 { 1.0 } else { -1.0 }).sum()
}

fn x_value(params: &TfimParams, s: usize) -> f64 {
    (0..params.l).map(|q| if (s >> q) & 1 == 0 { 1.0 } else { -1.0 }).sum()
}

fn hadamard_layer(l: usize) -> Result<GateList> {
    let mut gl = GateList::new(l);
    for q in 0..l {
        gl.push(Gate::one(&paulis::h(), q)?)?;
    }
    Ok(gl)
}

fn probabilities(state: &[C64]) -> Vec<f64> {
    state.iter().map(|a| a.norm_sqr()).collect()
}

/// Draws `n` bitstrings from `state` after `basis`, one noisy trajectory per
/// shot (a single noiseless distribution when `noise` is zero).
fn sample(
    state: &[C64],
    basis: Option<&GateList>,
    noise: &NoiseModel,
    n: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let Some(gl) = basis else {
        let dist = WeightedIndex::new(probabilities(state)).expect("normalized state has positive weight");
        return Ok((0..n).map(|_| dist.sample(rng)).collect());
    };
    if noise.is_noiseless() {
        let mut s = state.to_vec();
        gl.apply(&mut s)?;
        let dist = WeightedIndex::new(probabilities(&s)).expect("normalized state has positive weight");
        return Ok((0..n).map(|_| dist.sample(rng)).collect());
    }
    (0..n)
        .map(|_| {
            let s = apply_noisy(state, gl, noise, rng)?;
            let dist = WeightedIndex::new(probabilities(&s)).expect("normalized state has positive weight");
            Ok(dist.sample(rng))
        })
        .collect()
}

/// Energy from sampled bitstrings: half the shots in the Z basis for the ZZ
/// correlators, half after a Hadamard layer for the X terms.
///
/// Noise acts on the Hadamard layer only; the Z-basis readout is ideal.
pub fn dem_energy(state: &[C64], params: &TfimParams, shots: &ShotBudget, noise: &NoiseModel) -> Result<f64> {
    dem_energy_ensemble(&Ensemble::pure(state)?, params, shots, noise)
}

/// [`dem_energy`] on a mixture of prepared states.
pub fn dem_energy_ensemble(
    ensemble: &Ensemble,
    params: &TfimParams,
    shots: &ShotBudget,
    noise: &NoiseModel,
) -> Result<f64> {
    for m in ensemble.members() {
        check_state(m, params)?;
    }
    noise.validate()?;
    ShotBudget::new(shots.total_shots, shots.rng_seed)?;
    let nz = shots.total_shots.div_ceil(2);
    let nx = (shots.total_shots / 2).max(1);
    let layer = hadamard_layer(params.l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(shots.rng_seed);
    let mut zz = 0.0;
    for (m, k) in ensemble.members().iter().zip(ensemble.split(nz)) {
        zz += sample(m, None, noise, k, &mut rng)?.iter().map(|&s| zz_value(params, s)).sum::<f64>();
    }
    rng.set_stream(1);
    let mut x = 0.0;
    for (m, k) in ensemble.members().iter().zip(ensemble.split(nx)) {
        x += sample(m, Some(&layer), noise, k, &mut rng)?.iter().map(|&s| x_value(params, s)).sum::<f64>();
    }
    Ok(-params.j * zz / nz as f64 - params.g * x / nx as f64)
}

/// Exact `<psi|H|psi>`, the infinite-shot limit of [`dem_energy`].
pub fn dem_exact(state: &[C64], params: &TfimParams) -> Result<f64> {
    check_state(state, params)?;
    let h = build_tfim(params)?;
    Ok(inner(state, &h.matrix().matvec(state)?).re)
}

/// Variance of the noiseless [`dem_energy`] estimate for a shot total.
pub fn dem_variance(state: &[C64], params: &TfimParams, total_shots: u64) -> Result<f64> {
    check_state(state, params)?;
    let var = |p: &[f64], f: &dyn Fn(usize) -> f64| {
        let m: f64 = p.iter().enumerate().map(|(s, w)| w * f(s)).sum();
        p.iter().enumerate().map(|(s, w)| w * (f(s) - m).powi(2)).sum::<f64>()
    };
    let pz = probabilities(state);
    let mut sx = state.to_vec();
    hadamard_layer(params.l)?.apply(&mut sx)?;
    let px = probabilities(&sx);
    let nz = total_shots.div_ceil(2) as f64;
    let nx = (total_shots / 2).max(1) as f64;
    Ok(params.j.powi(2) * var(&pz, &|s| zz_value(params, s)) / nz
        + params.g.powi(2) * var(&px, &|s| x_value(params, s)) / nx)
}
