use std::f64::consts::PI;

use affqetu_circuit::{hadamard_test_at, HadamardMode, NoiseModel, Part, ShotBudget, TrotterOptions};
use affqetu_hamiltonian::{SpectrumBounds, TfimParams};
use affqetu_linalg::{norm, HermitianOperator, C64};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{EstimatorError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    /// Exact moments; shot counts are ignored.
    #[default]
    Exact,
    /// Binomial ancilla statistics drawn from exact outcome probabilities.
    Sampled,
    /// Gate-level Hadamard tests with Trotterized evolution and noise.
    Trotter,
}

pub(crate) struct BackendSpec<'a> {
    pub mode: EstimatorMode,
    pub time_scale: f64,
    pub noise: NoiseModel,
    pub tfim: Option<&'a TfimParams>,
    pub trotter: TrotterOptions,
    pub max_trajectories: usize,
    pub seed: u64,
}

/// Equal-weight mixture of pure states, such as the post-selected
/// trajectories of a noisy state preparation. Shot `i` of any measurement
/// runs on member `i mod n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<Vec<C64>>,
}

impl Ensemble {
    pub fn new(members: Vec<Vec<C64>>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(EstimatorError::BadConfig("ensemble has no members".into()));
        };
        let dim = first.len();
        for (i, m) in members.iter().enumerate() {
            if m.len() != dim {
                return Err(EstimatorError::BadConfig(format!("member {i} has length {}, expected {dim}", m.len())));
            }
            if (norm(m) - 1.0).abs() > 1e-8 {
                return Err(EstimatorError::BadConfig(format!("member {i} has norm {}", norm(m))));
            }
        }
        Ok(Self { members })
    }

    pub fn pure(state: &[C64]) -> Result<Self> {
        Self::new(vec![state.to_vec()])
    }

    pub fn members(&self) -> &[Vec<C64>] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].len()
    }

    /// Shots landing on each member out of `total`.
    pub fn split(&self, total: u64) -> Vec<u64> {
        let n = self.members.len() as u64;
        (0..n).map(|i| total / n + u64::from(i < total % n)).collect()
    }
}

/// Hadamard-test moments `Tr(rho e^{-i t s H})` of a fixed ensemble.
pub(crate) struct Backend<'a> {
    ensemble: &'a Ensemble,
    h_s: HermitianOperator,
    spec: BackendSpec<'a>,
    /// `(0, pi / s)`, under which the circuit transform `pi (H - lb) / width` is `s H`.
    bounds: SpectrumBounds,
}

impl<'a> Backend<'a> {
    pub fn new(ensemble: &'a Ensemble, h: &HermitianOperator, spec: BackendSpec<'a>) -> Result<Self> {
        let bad = |s: String| Err(EstimatorError::BadConfig(s));
        spec.noise.validate()?;
        if ensemble.dim() != h.dim() {
            return bad(format!("state of length {} for a Hamiltonian of dimension {}", ensemble.dim(), h.dim()));
        }
        if !(spec.time_scale > 0.0 && spec.time_scale.is_finite()) {
            return bad(format!("time scale {} must be positive", spec.time_scale));
        }
        if spec.max_trajectories == 0 {
            return bad("max_trajectories must be positive".into());
        }
        match spec.mode {
            EstimatorMode::Exact | EstimatorMode::Sampled if !spec.noise.is_noiseless() => {
                return bad("exact and sampled modes are noiseless; use trotter mode for p2 > 0".into());
            }
            EstimatorMode::Trotter => match spec.tfim {
                None => return bad("trotter mode needs the TFIM parameters".into()),
                Some(p) => {
                    p.validate()?;
                    if p.dim() != h.dim() {
                        return bad(format!("TFIM dimension {} differs from the Hamiltonian's {}", p.dim(), h.dim()));
                    }
                }
            },
            _ => {}
        }
        let bounds = SpectrumBounds::new(0.0, PI / spec.time_scale)?;
        Ok(Self { ensemble, h_s: h.affine(spec.time_scale, 0.0), spec, bounds })
    }

    pub fn time_scale(&self) -> f64 {
        self.spec.time_scale
    }

    pub fn is_exact(&self) -> bool {
        self.spec.mode == EstimatorMode::Exact
    }

    /// Moment at time `t`, with `shots` split between the real and imaginary
    /// parts; `key` selects an independent random stream.
    pub fn moment(&self, t: f64, shots: u64, key: u64) -> Result<C64> {
        let mode = match self.spec.mode {
            EstimatorMode::Exact => HadamardMode::Exact,
            EstimatorMode::Sampled => HadamardMode::Sampled,
            EstimatorMode::Trotter => HadamardMode::Trotter {
                params: self.spec.tfim.expect("checked in Backend::new"),
                bounds: &self.bounds,
                options: self.spec.trotter,
                max_trajectories: self.spec.max_trajectories,
            },
        };
        let members = self.ensemble.members();
        let run = |part: Part, total: u64| -> Result<f64> {
            if self.is_exact() {
                let mut acc = 0.0;
                for m in members {
                    let budget = ShotBudget::new(1, 0)?;
                    acc += hadamard_test_at(m, &self.h_s, t, part, &budget, &self.spec.noise, mode)?;
                }
                return Ok(acc / members.len() as f64);
            }
            let split = self.ensemble.split(total);
            let active = split.iter().filter(|&&k| k > 0).count();
            let mode = match mode {
                HadamardMode::Trotter { params, bounds, options, max_trajectories } => HadamardMode::Trotter {
                    params,
                    bounds,
                    options,
                    max_trajectories: (max_trajectories / active).max(1),
                },
                m => m,
            };
            let mut acc = 0.0;
            for (i, (m, &k)) in members.iter().zip(&split).enumerate().filter(|(_, (_, &k))| k > 0) {
                let purpose = ((i as u64) << 1) | u64::from(part == Part::Im);
                let budget = ShotBudget::new(k, derive_seed(self.spec.seed, key, purpose))?;
                acc += k as f64 * hadamard_test_at(m, &self.h_s, t, part, &budget, &self.spec.noise, mode)?;
            }
            Ok(acc / total as f64)
        };
        Ok(C64::new(run(Part::Re, shots.div_ceil(2).max(1))?, run(Part::Im, (shots / 2).max(1))?))
    }

    /// Shots charged for one moment.
    pub fn shots_per_moment(&self, shots: u64) -> u64 {
        if self.is_exact() {
            0
        } else {
            shots.div_ceil(2).max(1) + (shots / 2).max(1)
        }
    }
}

pub(crate) fn derive_seed(seed: u64, key: u64, purpose: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((key << 24) | purpose);
    rng.next_u64()
}
