use std::f64::consts::PI;

use affqetu_circuit::{
    qetu_execute_with, trotter_circuit_with, CircuitError, ExecOptions, NoiseModel, PostSelectionResult, QetuBackend,
    ShotBudget,
};
use affqetu_filter::cache::PhaseCache;
use affqetu_filter::{approximate_step, find_phases, FilterError, QspPhases};
use affqetu_hamiltonian::{build_tfim, linear_transform, SpectrumBounds, DEGENERACY_TOL};
use affqetu_linalg::{normalize, HermitianOperator, SpectralDecomposition, C64};
use affqetu_profiling::{
    acquire_moments, build_cdf, differentiate, extract_bounds_relaxed, fourier_coefficients, odd_orders,
    rescale_for_profiling, CdfProfile, MomentMode,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{relative_amplification, time_metrics, AffConfig, AffError, Amplification, ExecMode, Result};

/// Success probability below which a shot-based stage is declared collapsed.
const COLLAPSE: f64 = 1e-4;

/// Supplies QSP phases for a step filter of degree `eta`, cutoff `mu` and
/// transition half-width `w`.
pub trait FilterSource {
    fn phases(&mut self, eta: usize, mu: f64, w: f64) -> Result<QspPhases>;
}

impl FilterSource for PhaseCache {
    fn phases(&mut self, eta: usize, mu: f64, w: f64) -> Result<QspPhases> {
        if let Some((_, ph)) = self.get(eta, mu, w) {
            return Ok(ph.clone());
        }
        let poly = approximate_step(eta, mu, w)?;
        let ph = find_phases(&poly)?;
        log::debug!("synthesized eta = {eta}, mu = {mu}, w = {w}: eps_out = {}", poly.eps_out);
        self.insert(poly, ph.clone());
        Ok(ph)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    /// Filter followed by profiling.
    Adaptive,
    /// Stage-0 filter applied once more after the adaptive stages.
    Refilter,
    /// Repeated stage-0 filter without profiling.
    Static,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub index: usize,
    pub kind: StageKind,
    pub bounds_in: SpectrumBounds,
    /// Bounds extracted by profiling; equal to `bounds_in` for stages without profiling.
    pub bounds_out: SpectrumBounds,
    pub mu: f64,
    /// Transition half-width of the step polynomial actually used.
    pub halfwidth: f64,
    /// Post-selection rate of this stage (product over repetitions for static runs).
    pub success_probability: f64,
    /// Success probability before shot noise.
    pub expected_success: f64,
    /// Per-repetition success rates of a static stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub repetition_probabilities: Vec<f64>,
    /// Ground-state fidelity `|<psi_0|psi>|^2` after filtering.
    pub overlap_ground: f64,
    /// Evolution time of the filtering circuit, `eta pi / Lambda` per repetition.
    pub t: f64,
    /// Summed evolution time of the profiling Hadamard-test circuits.
    pub t_profile: f64,
    pub relaxations: u32,
    pub xi2_used: f64,
    #[serde(skip)]
    pub cdf: Option<CdfProfile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: AffConfig,
    pub stages: Vec<StageReport>,
    #[serde(skip)]
    pub final_state: Vec<C64>,
    pub initial_overlap: f64,
    pub final_overlap: f64,
    /// Product of stage success probabilities.
    pub cumulative_probability: f64,
    pub t_max: f64,
    pub t_total: f64,
    /// Circuit depth `T_max Lambda_0 / (eta pi)`.
    pub gamma: f64,
    pub relative_amplification: Amplification,
}

/// Haar-random state of dimension `dim` from normalized complex Gaussians.
pub fn haar_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> =
        (0..dim).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    normalize(&mut v);
    v
}

/// Ground-state fidelity `|<psi_0|psi>|^2`, summed over a degenerate ground space.
pub fn ground_overlap(decomp: &SpectralDecomposition, state: &[C64]) -> Result<f64> {
    let c = decomp.coefficients(state)?;
    let g = decomp.degenerate_groups(DEGENERACY_TOL)[0].clone();
    Ok(c[g].iter().map(|x| x.norm_sqr()).sum())
}

/// Independent seed for `(stage, purpose)` derived from the run seed.
fn derive_seed(seed: u64, stage: usize, purpose: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stage as u64) << 8) | purpose);
    rng.next_u64()
}

struct Context {
    h: HermitianOperator,
    ancilla: usize,
}

impl Context {
    fn new(config: &AffConfig, initial: &[C64]) -> Result<Self> {
        config.validate()?;
        let h = build_tfim(&config.tfim)?;
        if initial.len() != h.dim() {
            return Err(AffError::BadParameters(format!(
                "initial state has length {}, expected {}",
                initial.len(),
                h.dim()
            )));
        }
        let norm: f64 = initial.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(AffError::BadParameters(format!("initial state has norm {norm}")));
        }
        let decomp = h.decomposition()?;
        if config.mode == ExecMode::Exact {
            let b = &config.bounds0;
            if let Some(&lambda) = decomp.eigenvalues().iter().find(|&&l| !b.contains(l)) {
                return Err(AffError::InitialOutOfBounds { lambda, lb: b.lambda_lb, ub: b.lambda_ub });
            }
        }
        Ok(Self { h, ancilla: config.tfim.l })
    }

    fn decomp(&self) -> &SpectralDecomposition {
        self.h.decomposition().expect("decomposed in Context::new")
    }

    fn filter(
        &self,
        config: &AffConfig,
        state: &[C64],
        phases: &QspPhases,
        bounds: &SpectrumBounds,
        stage: usize,
        seed: u64,
    ) -> Result<PostSelectionResult> {
        let shots = ShotBudget::new(config.shots_filter, seed)?;
        let opts = ExecOptions { max_trajectories: config.max_trajectories };
        let res = match config.mode {
            ExecMode::Exact => {
                let h_t = linear_transform(&self.h, bounds)?;
                qetu_execute_with(state, phases, QetuBackend::Exact { h_t: &h_t }, &config.noise, &shots, &opts)
            }
            ExecMode::Trotter => {
                let cu = trotter_circuit_with(&config.tfim, bounds, 1.0, true, self.ancilla, &config.trotter)?;
                let backend = QetuBackend::Trotter { cu: &cu, ancilla: self.ancilla };
                qetu_execute_with(state, phases, backend, &config.noise, &shots, &opts)
            }
        };
        res.map_err(|e| match e {
            CircuitError::NoAcceptedShots { attempted } => AffError::NoAcceptedShots { stage, attempted },
            e => e.into(),
        })
    }

    fn profile(
        &self,
        config: &AffConfig,
        state: &[C64],
        bounds: &SpectrumBounds,
        stage: usize,
        seed: u64,
    ) -> Result<(CdfProfile, affqetu_profiling::Extraction)> {
        let wrap = |source| AffError::ProfilingFailed { stage, source };
        let h_p = rescale_for_profiling(&self.h, bounds).map_err(wrap)?;
        let mode = match (config.mode, config.exact_moments) {
            (ExecMode::Exact, true) => MomentMode::Exact,
            (ExecMode::Exact, false) => MomentMode::Sampled,
            (ExecMode::Trotter, _) => MomentMode::Trotter {
                params: &config.tfim,
                options: config.trotter,
                max_trajectories: config.max_trajectories,
            },
        };
        let noise = match config.mode {
            ExecMode::Exact => NoiseModel::noiseless(),
            ExecMode::Trotter => config.noise,
        };
        let moments =
            acquire_moments(state, &h_p, bounds, config.d, config.shots_profile, &noise, seed, mode).map_err(wrap)?;
        let coeffs = fourier_coefficients(config.d, config.beta).map_err(wrap)?;
        let cdf = differentiate(&build_cdf(&moments, &coeffs, config.grid).map_err(wrap)?);
        let ex = extract_bounds_relaxed(&cdf, config.xi1, config.xi2, bounds, config.max_relaxations).map_err(wrap)?;
        Ok((CdfProfile { bounds_x: Some((ex.x_lb, ex.x_ub)), ..cdf }, ex))
    }
}

/// Physical evolution time of one filtering circuit: `eta` applications of
/// `e^{-i H pi / Lambda}`.
fn filter_time(eta: usize, bounds: &SpectrumBounds) -> f64 {
    eta as f64 * PI / bounds.width()
}

/// Profiling runs a Re and an Im Hadamard test per odd order `k`, each
/// evolving the rescaled operator `(2 / Lambda)(H - lb) - 1` for time `k`.
fn profile_time(d: usize, bounds: &SpectrumBounds) -> f64 {
    odd_orders(d).iter().map(|&k| 2.0 * 2.0 * k as f64 / bounds.width()).sum()
}

/// Phases for cutoff `mu`, widening the transition band by 1.5x while the
/// step approximation misses the residual bound at degree `eta`.
pub fn stage_phases(config: &AffConfig, source: &mut dyn FilterSource, mu: f64) -> Result<(QspPhases, f64)> {
    let cap = config.max_halfwidth_at(mu);
    let mut w = config.halfwidth_at(mu);
    loop {
        match source.phases(config.eta, mu, w) {
            Err(AffError::Filter(FilterError::InfeasibleBand { eps })) if w < cap => {
                let next = (1.5 * w).min(cap);
                log::info!("band half-width {w} infeasible at mu = {mu} (eps = {eps}); widening to {next}");
                w = next;
            }
            r => return r.map(|ph| (ph, w)),
        }
    }
}

fn check_stage(config: &AffConfig, stage: usize, before: f64, after: f64, p: f64) -> Result<()> {
    if !config.overfilter_guard {
        return Ok(());
    }
    match config.mode {
        ExecMode::Exact if after < 0.5 * before => Err(AffError::Overfiltering { stage, before, after }),
        ExecMode::Trotter if p < COLLAPSE => Err(AffError::SuccessCollapse { stage, p }),
        _ => Ok(()),
    }
}

fn finish(
    config: &AffConfig,
    ctx: &Context,
    initial: &[C64],
    state: Vec<C64>,
    stages: Vec<StageReport>,
) -> Result<RunReport> {
    let decomp = ctx.decomp();
    let (t_max, t_total) = time_metrics(&stages);
    let amp = match relative_amplification(initial, &state, decomp) {
        Ok(a) if a.is_finite() => Amplification::Finite(a),
        Ok(_) => Amplification::Infinite,
        Err(AffError::ZeroInitialOverlap) => Amplification::Undefined,
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        initial_overlap: ground_overlap(decomp, initial)?,
        final_overlap: ground_overlap(decomp, &state)?,
        cumulative_probability: stages.iter().map(|s| s.success_probability).product(),
        gamma: t_max / filter_time(config.eta, &config.bounds0),
        t_max,
        t_total,
        relative_amplification: amp,
        stages,
        final_state: state,
        config: config.clone(),
    })
}

/// Adaptive finer filtering with a fresh in-memory phase cache.
pub fn run_aff(config: &AffConfig, initial: &[C64]) -> Result<RunReport> {
    run_aff_with(config, initial, &mut PhaseCache::default())
}

/// Adaptive finer filtering: for each stage `i`, filter with `(mu_i, bounds_i)`,
/// profile the filtered state to get `bounds_{i+1}`, and set
/// `mu_{i+1} = cos(c1 (lb + Lambda / m_i) + c2)` with the coefficients of the new bounds.
pub fn run_aff_with(config: &AffConfig, initial: &[C64], source: &mut dyn FilterSource) -> Result<RunReport> {
    let ctx = Context::new(config, initial)?;
    let mut state = initial.to_vec();
    let mut bounds = config.bounds0;
    let mut mu = config.mu0;
    let mut overlap = ground_overlap(ctx.decomp(), &state)?;
    let mut stages = Vec::with_capacity(config.stages + 1);
    for i in 0..config.stages {
        let (phases, w) = stage_phases(config, source, mu)?;
        let res = ctx.filter(config, &state, &phases, &bounds, i, derive_seed(config.seed, i, 0))?;
        let after = ground_overlap(ctx.decomp(), &res.state)?;
        log::info!(
            "stage {i}: bounds ({:.4}, {:.4}), mu {mu:.4}, p {:.4}, overlap {after:.4}",
            bounds.lambda_lb,
            bounds.lambda_ub,
            res.success_probability
        );
        check_stage(config, i, overlap, after, res.success_probability)?;
        state = res.state;
        overlap = after;
        let (cdf, ex) = ctx.profile(config, &state, &bounds, i, derive_seed(config.seed, i, 1))?;
        stages.push(StageReport {
            index: i,
            kind: StageKind::Adaptive,
            bounds_in: bounds,
            bounds_out: ex.bounds,
            mu,
            halfwidth: w,
            success_probability: res.success_probability,
            expected_success: res.expected_success,
            repetition_probabilities: Vec::new(),
            overlap_ground: after,
            t: filter_time(config.eta, &bounds),
            t_profile: profile_time(config.d, &bounds),
            relaxations: ex.relaxations,
            xi2_used: ex.xi2_used,
            cdf: Some(cdf),
        });
        bounds = ex.bounds;
        let c = bounds.coefficients();
        mu = (c.c1 * (bounds.lambda_lb + bounds.width() / config.m[i]) + c.c2).cos();
    }
    if config.final_refilter {
        let i = config.stages;
        let (phases, w) = stage_phases(config, source, config.mu0)?;
        let res = ctx.filter(config, &state, &phases, &config.bounds0, i, derive_seed(config.seed, i, 0))?;
        state = res.state;
        stages.push(StageReport {
            index: i,
            kind: StageKind::Refilter,
            bounds_in: config.bounds0,
            bounds_out: config.bounds0,
            mu: config.mu0,
            halfwidth: w,
            success_probability: res.success_probability,
            expected_success: res.expected_success,
            repetition_probabilities: Vec::new(),
            overlap_ground: ground_overlap(ctx.decomp(), &state)?,
            t: filter_time(config.eta, &config.bounds0),
            t_profile: 0.0,
            relaxations: 0,
            xi2_used: config.xi2,
            cdf: None,
        });
    }
    finish(config, &ctx, initial, state, stages)
}

/// Static baseline with a fresh phase cache.
pub fn run_static(config: &AffConfig, repetitions: usize, initial: &[C64]) -> Result<RunReport> {
    run_static_with(config, repetitions, initial, &mut PhaseCache::default())
}

/// Applies the stage-0 filter `(mu0, bounds0)` `repetitions` times without
/// profiling. The repetitions form one circuit, so the report has a single
/// stage with `T = repetitions * eta pi / Lambda_0`.
pub fn run_static_with(
    config: &AffConfig,
    repetitions: usize,
    initial: &[C64],
    source: &mut dyn FilterSource,
) -> Result<RunReport> {
    let ctx = Context::new(config, initial)?;
    let mut state = initial.to_vec();
    let mut probs = Vec::with_capacity(repetitions);
    let mut expected = 1.0;
    let mut halfwidth = config.halfwidth_at(config.mu0);
    if repetitions > 0 {
        let (phases, w) = stage_phases(config, source, config.mu0)?;
        halfwidth = w;
        for r in 0..repetitions {
            let res = ctx.filter(config, &state, &phases, &config.bounds0, 0, derive_seed(config.seed, r, 2))?;
            if config.overfilter_guard && config.mode == ExecMode::Trotter && res.success_probability < COLLAPSE {
                return Err(AffError::SuccessCollapse { stage: 0, p: res.success_probability });
            }
            probs.push(res.success_probability);
            expected *= res.expected_success;
            state = res.state;
        }
    }
    let stage = StageReport {
        index: 0,
        kind: StageKind::Static,
        bounds_in: config.bounds0,
        bounds_out: config.bounds0,
        mu: config.mu0,
        halfwidth,
        success_probability: probs.iter().product(),
        expected_success: expected,
        overlap_ground: ground_overlap(ctx.decomp(), &state)?,
        t: repetitions as f64 * filter_time(config.eta, &config.bounds0),
        t_profile: 0.0,
        relaxations: 0,
        xi2_used: config.xi2,
        repetition_probabilities: probs,
        cdf: None,
    };
    finish(config, &ctx, initial, state, vec![stage])
}
