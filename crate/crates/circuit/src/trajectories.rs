use affqetu_linalg::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::noise::{apply_with_errors, sample_errors};
use crate::{trajectory_rng, GateList, NoiseModel, Result};

/// Number of independent noise trajectories simulated per circuit run.
pub const DEFAULT_MAX_TRAJECTORIES: usize = 64;

/// Ancilla-resolved outcome of one simulated trajectory.
pub(crate) struct Trajectory {
    pub p0: f64,
    pub state: Vec<C64>,
}

/// Simulates `n` trajectories of `circuit` on `init`; trajectories without
/// error events share one noiseless simulation.
pub(crate) fn run(
    init: &[C64],
    circuit: &GateList,
    noise: &NoiseModel,
    seed: u64,
    n: usize,
    ancilla: usize,
) -> Result<Vec<Trajectory>> {
    circuit.check_state(init)?;
    let finish = |state: Vec<C64>| {
        let bit = 1usize << ancilla;
        let p0 = state.iter().enumerate().filter(|(s, _)| s & bit == 0).map(|(_, a)| a.norm_sqr()).sum();
        Trajectory { p0, state }
    };
    let clean = {
        let mut s = init.to_vec();
        circuit.apply(&mut s)?;
        s
    };
    if noise.is_noiseless() {
        return Ok(vec![finish(clean)]);
    }
    let out = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let errors = sample_errors(circuit, noise, &mut rng);
            if errors.is_empty() {
                finish(clean.clone())
            } else {
                let mut s = init.to_vec();
                apply_with_errors(&mut s, circuit, &errors);
                finish(s)
            }
        })
        .collect();
    Ok(out)
}

/// Generator for shot sampling, on a stream disjoint from the trajectories.
pub(crate) fn shot_rng(seed: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(1);
    r
}

/// Draws ancilla-0 counts: shot `s` runs on trajectory `s mod n`.
pub(crate) fn sample_counts(trajs: &[Trajectory], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = trajs.len() as u64;
    trajs
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let k = shots / n + u64::from((i as u64) < shots % n);
            binomial(k, t.p0, rng)
        })
        .collect()
}

pub(crate) fn binomial(n: u64, p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p.clamp(0.0, 1.0)).expect("probability clamped to [0, 1]").sample(rng)
}
