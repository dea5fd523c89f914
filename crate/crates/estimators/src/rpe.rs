use std::f64::consts::PI;

use affqetu_circuit::{NoiseModel, TrotterOptions, TrotterOrder, DEFAULT_MAX_TRAJECTORIES};
use affqetu_hamiltonian::TfimParams;
use affqetu_linalg::{HermitianOperator, C64};
use serde::{Deserialize, Serialize};

use crate::moments::{Backend, BackendSpec, Ensemble};
use crate::{Estimate, EstimatorError, EstimatorMode, Method, Result};

/// Deepest supported stage count; stage `j` enumerates `2^j` candidates.
const MAX_DEPTH: u32 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RpeConfig {
    /// Rough initial estimate, in the units of `H`.
    pub theta_prev: f64,
    /// Number of stages; stage `j` evolves for time `2^j`.
    #[serde(rename = "J")]
    pub depth: u32,
    /// Shots per moment, split evenly between the real and imaginary parts.
    #[serde(rename = "N_S")]
    pub shots: u64,
    pub noise: NoiseModel,
    pub mode: EstimatorMode,
    /// Evolution times apply to `time_scale * H`.
    pub time_scale: f64,
    pub trotter: TrotterOptions,
    /// Required in trotter mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfim: Option<TfimParams>,
    pub max_trajectories: usize,
    pub seed: u64,
}

impl RpeConfig {
    /// Exact mode, unit time scale, fourth-order Trotter steps of 0.5.
    pub fn new(theta_prev: f64, depth: u32, shots: u64) -> Self {
        Self {
            theta_prev,
            depth,
            shots,
            noise: NoiseModel::noiseless(),
            mode: EstimatorMode::Exact,
            time_scale: 1.0,
            trotter: TrotterOptions { order: TrotterOrder::Fourth, max_dt: 0.5 },
            tfim: None,
            max_trajectories: DEFAULT_MAX_TRAJECTORIES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(EstimatorError::BadConfig(s));
        if !(1..=MAX_DEPTH).contains(&self.depth) {
            return bad(format!("J = {} outside [1, {MAX_DEPTH}]", self.depth));
        }
        if self.shots == 0 {
            return bad("N_S must be at least 1".into());
        }
        if !self.theta_prev.is_finite() {
            return bad(format!("theta_prev = {} is not finite", self.theta_prev));
        }
        Ok(())
    }
}

/// `pi - |((x) mod 2pi) - pi|`: distance on the circle.
fn wrap_distance(x: f64) -> f64 {
    PI - (x.rem_euclid(2.0 * PI) - PI).abs()
}

/// One stage: the candidate `(2 k pi + arg_z) / 2^j` closest to `theta_prev`
/// on the circle, returned as the representative nearest `theta_prev`.
pub fn rpe_update(theta_prev: f64, arg_z: f64, j: u32) -> f64 {
    let k = 1u64 << j;
    let mut best = (f64::INFINITY, theta_prev);
    for m in 0..k {
        let cand = (2.0 * PI * m as f64 + arg_z) / k as f64;
        let d = wrap_distance(cand - theta_prev);
        if d < best.0 {
            best = (d, cand);
        }
    }
    let delta = (best.1 - theta_prev + PI).rem_euclid(2.0 * PI) - PI;
    theta_prev + delta
}

/// Robust phase estimation: stage `j` measures `<psi| e^{i 2^j s H} |psi>`
/// (the conjugate of the standard Hadamard-test moment) and refines the
/// previous estimate by one binary digit.
///
/// Assumes a ground-state overlap large enough (above about 0.53) that the
/// ground phase dominates `arg Z_j`; this is not checked.
pub fn rpe_estimate(state: &[C64], h: &HermitianOperator, config: &RpeConfig) -> Result<Estimate> {
    rpe_estimate_ensemble(&Ensemble::pure(state)?, h, config)
}

/// [`rpe_estimate`] on a mixture of prepared states.
pub fn rpe_estimate_ensemble(ensemble: &Ensemble, h: &HermitianOperator, config: &RpeConfig) -> Result<Estimate> {
    config.validate()?;
    let backend = Backend::new(
        ensemble,
        h,
        BackendSpec {
            mode: config.mode,
            time_scale: config.time_scale,
            noise: config.noise,
            tfim: config.tfim.as_ref(),
            trotter: config.trotter,
            max_trajectories: config.max_trajectories,
            seed: config.seed,
        },
    )?;
    let s = backend.time_scale();
    let mut theta = s * config.theta_prev;
    let mut stages = Vec::with_capacity(config.depth as usize);
    for j in 0..config.depth {
        let t = (1u64 << j) as f64;
        let z = backend.moment(t, config.shots, j as u64)?.conj();
        theta = rpe_update(theta, z.arg(), j);
        stages.push(theta / s);
    }
    Ok(Estimate {
        method: Method::Rpe,
        value: theta / s,
        stages,
        shots: config.depth as u64 * backend.shots_per_moment(config.shots),
        t_max: (1u64 << (config.depth - 1)) as f64,
    })
}
