use std::f64::consts::PI;

use affqetu_circuit::{NoiseModel, TrotterOptions, TrotterOrder, DEFAULT_MAX_TRAJECTORIES};
use affqetu_hamiltonian::TfimParams;
use affqetu_linalg::{HermitianOperator, C64};
use serde::{Deserialize, Serialize};

use crate::moments::{Backend, BackendSpec, Ensemble};
use crate::{Estimate, EstimatorError, EstimatorMode, Method, Result};

const GRID_POINTS: usize = 200;
const MAX_STAGES: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcelsConfig {
    /// Initial search interval, in the units of `H`.
    pub lambda_lb: f64,
    pub lambda_ub: f64,
    #[serde(rename = "J")]
    pub stages: u32,
    /// Shots per moment, split evenly between the real and imaginary parts.
    #[serde(rename = "N_S")]
    pub shots: u64,
    /// Samples per stage, at times `n tau_j` for `n = 0..N`.
    #[serde(rename = "N")]
    pub samples: usize,
    pub tau: f64,
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

impl QcelsConfig {
    /// `N = 5`, `tau = 0.2`, `J = 9`, exact mode, unit time scale.
    pub fn new(lambda_lb: f64, lambda_ub: f64, shots: u64) -> Self {
        Self {
            lambda_lb,
            lambda_ub,
            stages: 9,
            shots,
            samples: 5,
            tau: 0.2,
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
        if !(self.lambda_lb < self.lambda_ub) || !self.lambda_lb.is_finite() || !self.lambda_ub.is_finite() {
            return bad(format!("bounds ({}, {}) must be finite and increasing", self.lambda_lb, self.lambda_ub));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau = {} must be positive", self.tau));
        }
        if self.samples < 2 {
            return bad(format!("N = {} must be at least 2", self.samples));
        }
        if !(1..=MAX_STAGES).contains(&self.stages) {
            return bad(format!("J = {} outside [1, {MAX_STAGES}]", self.stages));
        }
        if self.shots == 0 {
            return bad("N_S must be at least 1".into());
        }
        Ok(())
    }
}

/// `r* = (1/N) sum_n Z_n e^{i theta n tau}`.
fn optimal_r(z: &[C64], tau: f64, theta: f64) -> C64 {
    let sum: C64 = z.iter().enumerate().map(|(n, zn)| zn * C64::from_polar(1.0, theta * n as f64 * tau)).sum();
    sum / z.len() as f64
}

/// `min_r (1/N) sum_n |Z_n - r e^{-i theta n tau}|^2`, attained at the closed-form `r*`.
pub fn qcels_objective(z: &[C64], tau: f64, theta: f64) -> f64 {
    let r = optimal_r(z, tau, theta);
    let sum: f64 =
        z.iter().enumerate().map(|(n, zn)| (zn - r * C64::from_polar(1.0, -theta * n as f64 * tau)).norm_sqr()).sum();
    sum / z.len() as f64
}

/// Best `(theta, r)` in `[lb, ub]`: a 200-point grid scan, then golden-section
/// refinement around the best grid point to `1e-10 / tau`.
pub fn qcels_fit(z: &[C64], tau: f64, lb: f64, ub: f64) -> (f64, C64) {
    let f = |t: f64| qcels_objective(z, tau, t);
    let step = (ub - lb) / (GRID_POINTS - 1) as f64;
    let best = (0..GRID_POINTS)
        .map(|i| lb + step * i as f64)
        .map(|t| (t, f(t)))
        .fold((lb, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc });
    let (mut a, mut b) = ((best.0 - step).max(lb), (best.0 + step).min(ub));
    let tol = 1e-10 / tau;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mut theta = 0.5 * (a + b);
    if best.1 < f(theta) {
        theta = best.0;
    }
    (theta, optimal_r(z, tau, theta))
}

/// Quantum complex exponential least squares: stage `j` samples moments at
/// `n tau 2^j`, fits `r e^{-i theta t}` and narrows the search interval to
/// `theta* +- pi / (2 tau_j)`.
pub fn qcels_estimate(state: &[C64], h: &HermitianOperator, config: &QcelsConfig) -> Result<Estimate> {
    qcels_estimate_ensemble(&Ensemble::pure(state)?, h, config)
}

/// [`qcels_estimate`] on a mixture of prepared states.
pub fn qcels_estimate_ensemble(ensemble: &Ensemble, h: &HermitianOperator, config: &QcelsConfig) -> Result<Estimate> {
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
    let (mut lb, mut ub) = (s * config.lambda_lb, s * config.lambda_ub);
    let mut theta = 0.5 * (lb + ub);
    let mut stages = Vec::with_capacity(config.stages as usize);
    for j in 0..config.stages {
        let tau_j = config.tau * 2f64.powi(j as i32);
        let z = (0..config.samples)
            .map(|n| backend.moment(n as f64 * tau_j, config.shots, ((j as u64) << 16) | n as u64))
            .collect::<Result<Vec<_>>>()?;
        theta = qcels_fit(&z, tau_j, lb, ub).0;
        stages.push(theta / s);
        (lb, ub) = (theta - PI / (2.0 * tau_j), theta + PI / (2.0 * tau_j));
    }
    Ok(Estimate {
        method: Method::Qcels,
        value: theta / s,
        stages,
        shots: config.stages as u64 * config.samples as u64 * backend.shots_per_moment(config.shots),
        t_max: (config.samples - 1) as f64 * config.tau * 2f64.powi(config.stages as i32 - 1),
    })
}
