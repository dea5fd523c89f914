use affqetu_circuit::{hadamard_test, HadamardMode, NoiseModel, Part, ShotBudget, TrotterOptions};
use affqetu_hamiltonian::{SpectrumBounds, TfimParams};
use affqetu_linalg::{HermitianOperator, C64};

use crate::{ProfilingError, Result};

/// How moments `<psi| e^{-ik H_p} |psi>` of the profiling operator are obtained.
#[derive(Clone, Copy, Debug)]
pub enum MomentMode<'a> {
    /// Exact expectation values.
    Exact,
    /// Binomial Hadamard-test statistics from exact outcome probabilities.
    Sampled,
    /// Gate-level Hadamard test with a Trotterized controlled evolution.
    Trotter { params: &'a TfimParams, options: TrotterOptions, max_trajectories: usize },
}

/// Odd orders `1, 3, ..., D`; even nonzero orders have zero coefficient.
pub fn odd_orders(d: usize) -> Vec<u32> {
    (1..=d as u32).step_by(2).collect()
}

/// Shots per Re/Im part: `budget / (2 * number of moments)`, at least one.
pub fn shots_per_part(budget: u64, d: usize) -> u64 {
    (budget / (2 * odd_orders(d).len() as u64)).max(1)
}

/// Moments `M_k` for `k = 0..=D`, index `k`; `M_0 = 1`, even `k > 0` left at zero.
///
/// `h_p` is the rescaled operator from [`crate::rescale_for_profiling`] with
/// `bounds`; trotter mode rebuilds the same evolution from the TFIM parameters.
#[allow(clippy::too_many_arguments)]
pub fn acquire_moments(
    state: &[C64],
    h_p: &HermitianOperator,
    bounds: &SpectrumBounds,
    d: usize,
    budget: u64,
    noise: &NoiseModel,
    seed: u64,
    mode: MomentMode<'_>,
) -> Result<Vec<C64>> {
    if d % 2 == 0 {
        return Err(ProfilingError::BadParameters(format!("D = {d} must be odd")));
    }
    let per_part = shots_per_part(budget, d);
    // With lb unchanged and width pi Lambda / 2, the circuit transform
    // pi (H - lb) / width equals H_p + 1.
    let stretched =
        SpectrumBounds::new(bounds.lambda_lb, bounds.lambda_lb + 0.5 * std::f64::consts::PI * bounds.width())?;
    let mut out = vec![C64::new(0.0, 0.0); d + 1];
    out[0] = C64::new(1.0, 0.0);
    for (idx, k) in odd_orders(d).into_iter().enumerate() {
        let mut parts = [0.0; 2];
        for (p, part) in [Part::Re, Part::Im].into_iter().enumerate() {
            let shots = ShotBudget::new(per_part, seed.wrapping_add((4 * idx + p) as u64 * 0x9E37_79B9))?;
            parts[p] = match mode {
                MomentMode::Exact => hadamard_test(state, h_p, k, part, &shots, noise, HadamardMode::Exact)?,
                MomentMode::Sampled => hadamard_test(state, h_p, k, part, &shots, noise, HadamardMode::Sampled)?,
                MomentMode::Trotter { params, options, max_trajectories } => {
                    let m = HadamardMode::Trotter { params, bounds: &stretched, options, max_trajectories };
                    hadamard_test(state, h_p, k, part, &shots, noise, m)?
                }
            };
        }
        let mut z = C64::new(parts[0], parts[1]);
        if matches!(mode, MomentMode::Trotter { .. }) {
            z *= C64::from_polar(1.0, k as f64);
        }
        out[k as usize] = z;
    }
    Ok(out)
}
