use std::path::{Path, PathBuf};

use affqetu_aff::{default_divisions, AffConfig, ExecMode};
use affqetu_circuit::{NoiseModel, TrotterOptions, TrotterOrder, DEFAULT_MAX_TRAJECTORIES};
use affqetu_hamiltonian::{Boundary, SpectrumBounds, TfimParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Full experiment description. Every section is optional in the file;
/// missing keys take the defaults below and unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Root directory for run folders.
    pub out: PathBuf,
    /// Starting state for aff, static, profile and estimate runs.
    pub state: InitialState,
    pub tfim: TfimSection,
    /// Initial spectrum bounds; defaults to `+-1.05` times the TFIM norm bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    pub execution: ExecutionSection,
    pub aff: AffSection,
    #[serde(rename = "static")]
    pub static_run: StaticSection,
    pub profile: ProfileSection,
    pub estimate: EstimateSection,
    pub theory: TheorySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("runs"),
            state: InitialState::Haar,
            tfim: TfimSection::default(),
            bounds: None,
            execution: ExecutionSection::default(),
            aff: AffSection::default(),
            static_run: StaticSection::default(),
            profile: ProfileSection::default(),
            estimate: EstimateSection::default(),
            theory: TheorySection::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// Haar-random state drawn from the run seed.
    Haar,
    /// `|0...0>`.
    Zero,
    /// `|+...+>`.
    Plus,
    /// Exact ground state.
    Ground,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TfimSection {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub g: f64,
    pub boundary: Boundary,
}

impl Default for TfimSection {
    fn default() -> Self {
        Self { l: 6, j: 1.0, g: 1.0, boundary: Boundary::Periodic }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub lambda_lb: f64,
    pub lambda_ub: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExecutionSection {
    pub mode: ExecMode,
    /// Two-qubit depolarizing probability.
    pub p2: f64,
    /// Single-qubit depolarizing probability; `p2 / 10` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    pub trotter_order: TrotterOrder,
    pub max_dt: f64,
    pub max_trajectories: usize,
}

impl Default for ExecutionSection {
    fn default() -> Self {
        Self {
            mode: ExecMode::Exact,
            p2: 0.0,
            p1: None,
            trotter_order: TrotterOrder::Second,
            max_dt: 1.0,
            max_trajectories: DEFAULT_MAX_TRAJECTORIES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AffSection {
    #[serde(rename = "M")]
    pub stages: usize,
    pub eta: usize,
    pub mu0: f64,
    /// Division coefficients; `(4, ..., 4, 2, 2)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<f64>>,
    pub band_halfwidth: f64,
    pub xi1: f64,
    pub xi2: f64,
    #[serde(rename = "D")]
    pub d: usize,
    pub beta: f64,
    pub grid: usize,
    pub max_relaxations: u32,
    pub shots_filter: u64,
    pub shots_profile: u64,
    pub exact_moments: bool,
    pub final_refilter: bool,
    pub overfilter_guard: bool,
}

impl Default for AffSection {
    fn default() -> Self {
        let r = AffConfig::reference(TfimParams::periodic(6, 1.0, 1.0), SpectrumBounds { lambda_lb: -1.0, lambda_ub: 1.0 });
        Self {
            stages: r.stages,
            eta: r.eta,
            mu0: r.mu0,
            m: None,
            band_halfwidth: r.band_halfwidth,
            xi1: r.xi1,
            xi2: r.xi2,
            d: r.d,
            beta: r.beta,
            grid: r.grid,
            max_relaxations: r.max_relaxations,
            shots_filter: r.shots_filter,
            shots_profile: r.shots_profile,
            exact_moments: r.exact_moments,
            final_refilter: r.final_refilter,
            overfilter_guard: r.overfilter_guard,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaticSection {
    pub repetitions: usize,
}

impl Default for StaticSection {
    fn default() -> Self {
        Self { repetitions: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    #[serde(rename = "D")]
    pub d: usize,
    pub beta: f64,
    pub grid: usize,
    pub xi1: f64,
    pub xi2: f64,
    pub max_relaxations: u32,
    pub shots: u64,
    pub exact_moments: bool,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            d: 7,
            beta: 5.0,
            grid: affqetu_profiling::DEFAULT_GRID,
            xi1: 0.03,
            xi2: 0.02,
            max_relaxations: 3,
            shots: 1000,
            exact_moments: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    /// Estimate on the initial state itself.
    None,
    /// Run AFF on the initial state first.
    Aff,
    /// Run static repetitions on the initial state first.
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateSection {
    pub prepare: Preparation,
    /// Shots per Hadamard-test moment, split between Re and Im.
    #[serde(rename = "N_S")]
    pub shots: u64,
    /// Register shots for direct measurement.
    pub dem_shots: u64,
    /// Exact moments instead of sampled ones (exact mode only).
    pub exact_moments: bool,
    #[serde(rename = "rpe_J")]
    pub rpe_depth: u32,
    /// Rough RPE starting point; a DEM run supplies it when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prev: Option<f64>,
    #[serde(rename = "qcels_J")]
    pub qcels_stages: u32,
    #[serde(rename = "N")]
    pub samples: usize,
    pub tau: f64,
    /// QCELS search interval; the initial bounds when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_lb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_ub: Option<f64>,
    /// Evolutions apply to `time_scale * H`; 1 in exact mode and
    /// `pi / Lambda_0` in trotter mode when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_scale: Option<f64>,
    pub trotter_order: TrotterOrder,
    pub max_dt: f64,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            prepare: Preparation::None,
            shots: 10_000,
            dem_shots: 10_000,
            exact_moments: false,
            rpe_depth: 8,
            theta_prev: None,
            qcels_stages: 9,
            samples: 5,
            tau: 0.2,
            lambda_lb: None,
            lambda_ub: None,
            time_scale: None,
            trotter_order: TrotterOrder::Fourth,
            max_dt: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheorySection {
    /// Transformed eigenvalues `(lt0, lt1)` of the stretch scan.
    pub lt0: f64,
    pub lt1: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub points: usize,
    pub a0: f64,
    pub delta_a: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Default for TheorySection {
    fn default() -> Self {
        Self {
            lt0: 0.01,
            lt1: 0.05,
            gamma_lo: 1.0,
            gamma_hi: 100.0,
            points: 400,
            a0: 1.0,
            delta_a: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1],
            eps: vec![1e-1, 1e-2, 1e-3],
        }
    }
}

impl ExperimentConfig {
    /// Parses `text`, applies `key.path=value` overrides, then deserializes.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn tfim(&self) -> Result<TfimParams, CliError> {
        let p = TfimParams { l: self.tfim.l, j: self.tfim.j, g: self.tfim.g, boundary: self.tfim.boundary };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn bounds0(&self) -> Result<SpectrumBounds, CliError> {
        match self.bounds {
            Some(b) => SpectrumBounds::new(b.lambda_lb, b.lambda_ub).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(SpectrumBounds::default_for(&self.tfim()?)),
        }
    }

    pub fn noise(&self) -> Result<NoiseModel, CliError> {
        let e = &self.execution;
        NoiseModel::with_p1(e.p2, e.p1.unwrap_or(e.p2 / 10.0)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn trotter(&self) -> TrotterOptions {
        TrotterOptions { order: self.execution.trotter_order, max_dt: self.execution.max_dt }
    }

    pub fn aff_config(&self) -> Result<AffConfig, CliError> {
        let a = &self.aff;
        let cfg = AffConfig {
            tfim: self.tfim()?,
            stages: a.stages,
            eta: a.eta,
            mu0: a.mu0,
            m: a.m.clone().unwrap_or_else(|| default_divisions(a.stages)),
            band_halfwidth: a.band_halfwidth,
            xi1: a.xi1,
            xi2: a.xi2,
            d: a.d,
            beta: a.beta,
            grid: a.grid,
            max_relaxations: a.max_relaxations,
            bounds0: self.bounds0()?,
            noise: self.noise()?,
            shots_filter: a.shots_filter,
            shots_profile: a.shots_profile,
            mode: self.execution.mode,
            exact_moments: a.exact_moments,
            trotter: self.trotter(),
            max_trajectories: self.execution.max_trajectories,
            seed: self.seed,
            final_refilter: a.final_refilter,
            overfilter_guard: a.overfilter_guard,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Sets `a.b.c = value` in `table`. The value is read as a TOML literal
/// when it parses as one and as a bare string otherwise.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override `{spec}` has an empty key")));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed table has key v"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let (last, parents) = path.split_last().expect("path is not empty");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| CliError::Config(format!("override `{spec}`: `{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
