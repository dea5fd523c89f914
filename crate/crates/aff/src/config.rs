use affqetu_circuit::{NoiseModel, TrotterOptions, DEFAULT_MAX_TRAJECTORIES};
use affqetu_hamiltonian::{SpectrumBounds, TfimParams};
use serde::{Deserialize, Serialize};

use crate::{AffError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    /// Filters applied through the eigendecomposition; moments are exact or
    /// sampled from exact Hadamard-test probabilities.
    #[default]
    Exact,
    /// Gate-level circuits with Trotterized controlled evolutions and noise.
    Trotter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffConfig {
    pub tfim: TfimParams,
    /// Number of filtering stages `M`.
    #[serde(rename = "M")]
    pub stages: usize,
    pub eta: usize,
    pub mu0: f64,
    /// Division coefficients `m_i`; the cutoff after stage `i` is `cos(pi / (2 m_i))`.
    pub m: Vec<f64>,
    /// Transition half-width `w` of the step polynomial, shrunk near `mu = 0` or `1`.
    pub band_halfwidth: f64,
    pub xi1: f64,
    pub xi2: f64,
    #[serde(rename = "D")]
    pub d: usize,
    pub beta: f64,
    pub grid: usize,
    pub max_relaxations: u32,
    pub bounds0: SpectrumBounds,
    pub noise: NoiseModel,
    pub shots_filter: u64,
    pub shots_profile: u64,
    pub mode: ExecMode,
    /// Exact moments instead of sampled Hadamard tests (exact mode only).
    pub exact_moments: bool,
    pub trotter: TrotterOptions,
    pub max_trajectories: usize,
    pub seed: u64,
    /// Apply the stage-0 filter once more after the last stage.
    pub final_refilter: bool,
    /// Abort when a stage loses more than half of the ground overlap (exact
    /// mode) or its success probability collapses (trotter mode).
    pub overfilter_guard: bool,
}

/// `(4, ..., 4, 2, 2)`: coarse cuts early, halving in the last two stages.
pub fn default_divisions(stages: usize) -> Vec<f64> {
    (0..stages).map(|i| if i + 2 < stages { 4.0 } else { 2.0 }).collect()
}

impl AffConfig {
    /// L=6-style reference run: `M = 3`, `eta = 14`, `mu0 = 0.95`, `D = 7`,
    /// `beta = 5`, thresholds `(0.03, 0.02)` and `10^3` shots per stage.
    pub fn reference(tfim: TfimParams, bounds0: SpectrumBounds) -> Self {
        Self {
            tfim,
            stages: 3,
            eta: 14,
            mu0: 0.95,
            m: default_divisions(3),
            band_halfwidth: 0.03,
            xi1: 0.03,
            xi2: 0.02,
            d: 7,
            beta: 5.0,
            grid: affqetu_profiling::DEFAULT_GRID,
            max_relaxations: 3,
            bounds0,
            noise: NoiseModel::noiseless(),
            shots_filter: 1000,
            shots_profile: 1000,
            mode: ExecMode::Exact,
            exact_moments: false,
            trotter: TrotterOptions::default(),
            max_trajectories: DEFAULT_MAX_TRAJECTORIES,
            seed: 0,
            final_refilter: false,
            overfilter_guard: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(AffError::BadConfig(s));
        self.tfim.validate()?;
        self.bounds0.validate()?;
        self.noise.validate()?;
        if self.stages == 0 {
            return bad("M must be at least 1".into());
        }
        if self.eta % 2 != 0 || self.eta < 2 {
            return bad(format!("eta = {} must be even and at least 2", self.eta));
        }
        if !(self.mu0 > 0.0 && self.mu0 < 1.0) {
            return bad(format!("mu0 = {} outside (0, 1)", self.mu0));
        }
        if self.m.len() != self.stages {
            return bad(format!("m has {} entries, expected M = {}", self.m.len(), self.stages));
        }
        if let Some(mi) = self.m.iter().find(|&&mi| !(mi >= 2.0)) {
            return bad(format!("division coefficient {mi} below 2"));
        }
        if !(self.band_halfwidth > 0.0) {
            return bad(format!("band half-width {} must be positive", self.band_halfwidth));
        }
        if !(self.xi1 > 0.0 && self.xi2 > 0.0) {
            return bad(format!("thresholds ({}, {}) must be positive", self.xi1, self.xi2));
        }
        if self.d % 2 == 0 {
            return bad(format!("D = {} must be odd", self.d));
        }
        if self.shots_filter == 0 || (self.shots_profile == 0 && !self.exact_moments) {
            return bad("shot budgets must be positive".into());
        }
        if self.mode == ExecMode::Exact && !self.noise.is_noiseless() {
            return bad("exact mode is noiseless; use trotter mode for p2 > 0".into());
        }
        if self.mode == ExecMode::Trotter && self.exact_moments {
            return bad("exact moments are only available in exact mode".into());
        }
        if self.max_trajectories == 0 {
            return bad("max_trajectories must be positive".into());
        }
        Ok(())
    }

    /// Starting half-width at cutoff `mu`: `min(w, mu / 2, (1 - mu) / 2)`.
    pub fn halfwidth_at(&self, mu: f64) -> f64 {
        self.band_halfwidth.min(0.5 * mu).min(0.5 * (1.0 - mu))
    }

    /// Widest half-width tried when the band is infeasible at degree `eta`.
    pub fn max_halfwidth_at(&self, mu: f64) -> f64 {
        0.9 * mu.min(1.0 - mu)
    }
}
