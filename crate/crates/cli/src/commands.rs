use std::f64::consts::PI;

use affqetu_aff::theory::{
    gamma_aff_prediction, gamma_static_prediction, linear_regime_window, local_exponent, loglog_slope, stretch_scan,
};
use affqetu_aff::{haar_state, run_aff, run_static, AffError, ExecMode, RunReport, StageReport};
use affqetu_circuit::{CircuitError, ShotBudget, TrotterOptions};
use affqetu_estimators::{
    dem_energy, dem_exact, qcels_estimate, rpe_estimate, Estimate, EstimatorError, EstimatorMode, Method,
    QcelsConfig, RpeConfig,
};
use affqetu_hamiltonian::{build_tfim, spectral_gaps, SpectrumBounds, TfimParams};
use affqetu_linalg::{HermitianOperator, C64};
use affqetu_profiling::{
    acquire_moments, build_cdf, differentiate, extract_bounds_relaxed, fourier_coefficients, rescale_for_profiling,
    to_x, MomentMode, ProfilingError,
};
use serde::Serialize;
use serde_json::json;

use crate::output::{num, Csv, RunDir};
use crate::{CliError, ExperimentConfig, InitialState, Preparation};

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

impl From<AffError> for CliError {
    fn from(e: AffError) -> Self {
        match e {
            AffError::BadConfig(_) | AffError::InitialOutOfBounds { .. } | AffError::BadParameters(_) => {
                CliError::Config(e.to_string())
            }
            AffError::NoAcceptedShots { .. } | AffError::Circuit(CircuitError::NoAcceptedShots { .. }) => {
                CliError::NoAcceptedShots(e.to_string())
            }
            AffError::ProfilingFailed { .. } | AffError::Profiling(_) => CliError::ProfilingFailed(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::BadConfig(_) => CliError::Config(e.to_string()),
            EstimatorError::Circuit(CircuitError::NoAcceptedShots { .. }) => CliError::NoAcceptedShots(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<ProfilingError> for CliError {
    fn from(e: ProfilingError) -> Self {
        match e {
            ProfilingError::BadParameters(_) => CliError::Config(e.to_string()),
            _ => CliError::ProfilingFailed(e.to_string()),
        }
    }
}

struct System {
    params: TfimParams,
    h: HermitianOperator,
    bounds: SpectrumBounds,
}

impl System {
    fn new(config: &ExperimentConfig) -> Result<Self, CliError> {
        let params = config.tfim()?;
        let bounds = config.bounds0()?;
        let h = build_tfim(&params).map_err(config_err)?;
        h.decomposition().map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(Self { params, h, bounds })
    }

    fn eigenvalues(&self) -> &[f64] {
        self.h.decomposition().expect("computed in System::new").eigenvalues()
    }

    fn initial_state(&self, kind: InitialState, seed: u64) -> Vec<C64> {
        let dim = self.h.dim();
        match kind {
            InitialState::Haar => haar_state(dim, seed),
            InitialState::Zero => {
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[0] = C64::new(1.0, 0.0);
                v
            }
            InitialState::Plus => vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim],
            InitialState::Ground => {
                self.h.decomposition().expect("computed in System::new").eigenvector(0).to_vec()
            }
        }
    }
}

fn stages_csv(stages: &[StageReport]) -> String {
    let mut csv = Csv::new(&["i", "lambda_lb", "lambda_ub", "mu", "p", "overlap", "halfwidth", "t", "t_profile"]);
    for s in stages {
        csv.row(&[
            s.index.to_string(),
            num(s.bounds_in.lambda_lb),
            num(s.bounds_in.lambda_ub),
            num(s.mu),
            num(s.success_probability),
            num(s.overlap_ground),
            num(s.halfwidth),
            num(s.t),
            num(s.t_profile),
        ]);
    }
    csv.into_string()
}

fn write_run(dir: &mut RunDir, report: &RunReport) -> Result<(), CliError> {
    dir.write_json("report.json", report)?;
    dir.write("stages.csv", stages_csv(&report.stages))?;
    for s in &report.stages {
        if let Some(cdf) = &s.cdf {
            dir.write(&format!("cdf_{}.csv", s.index), cdf.to_csv())?;
        }
    }
    Ok(())
}

pub fn spectrum(config: &ExperimentConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let sys = System::new(config)?;
    let mut csv = Csv::new(&["index", "eigenvalue"]);
    for (i, l) in sys.eigenvalues().iter().enumerate() {
        csv.row(&[i.to_string(), num(*l)]);
    }
    dir.write("spectrum.csv", csv.into_string())?;
    let gaps = spectral_gaps(sys.h.decomposition().expect("computed in System::new"), &sys.bounds)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    dir.write_json(
        "report.json",
        &json!({
            "tfim": sys.params,
            "bounds": sys.bounds,
            "lambda0": sys.eigenvalues()[0],
            "gaps": gaps,
        }),
    )
}

pub fn aff(config: &ExperimentConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let cfg = config.aff_config()?;
    let sys = System::new(config)?;
    let report = run_aff(&cfg, &sys.initial_state(config.state, config.seed))?;
    write_run(dir, &report)
}

pub fn static_run(config: &ExperimentConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let cfg = config.aff_config()?;
    let sys = System::new(config)?;
    let report = run_static(&cfg, config.static_run.repetitions, &sys.initial_state(config.state, config.seed))?;
    write_run(dir, &report)?;
    let mut csv = Csv::new(&["repetition", "p"]);
    for (i, p) in report.stages.iter().flat_map(|s| &s.repetition_probabilities).enumerate() {
        csv.row(&[i.to_string(), num(*p)]);
    }
    dir.write("repetitions.csv", csv.into_string())
}

pub fn profile(config: &ExperimentConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let p = &config.profile;
    let sys = System::new(config)?;
    let noise = config.noise()?;
    let coeffs = fourier_coefficients(p.d, p.beta)?;
    let state = sys.initial_state(config.state, config.seed);
    let h_p = rescale_for_profiling(&sys.h, &sys.bounds)?;
    let mode = match (config.execution.mode, p.exact_moments) {
        (ExecMode::Exact, true) => MomentMode::Exact,
        (ExecMode::Exact, false) => MomentMode::Sampled,
        (ExecMode::Trotter, _) => MomentMode::Trotter {
            params: &sys.params,
            options: config.trotter(),
            max_trajectories: config.execution.max_trajectories,
        },
    };
    if config.execution.mode == ExecMode::Exact && !noise.is_noiseless() {
        return Err(CliError::Config("exact mode is noiseless; use trotter mode for p2 > 0".into()));
    }
    let moments = acquire_moments(&state, &h_p, &sys.bounds, p.d, p.shots, &noise, config.seed, mode)?;
    let mut csv = Csv::new(&["k", "re", "im"]);
    for (k, m) in moments.iter().enumerate() {
        csv.row(&[k.to_string(), num(m.re), num(m.im)]);
    }
    dir.write("moments.csv", csv.into_string())?;
    let cdf = differentiate(&build_cdf(&moments, &coeffs, p.grid)?);
    let extraction = extract_bounds_relaxed(&cdf, p.xi1, p.xi2, &sys.bounds, p.max_relaxations);
    let bounds_x = extraction.as_ref().ok().map(|ex| (ex.x_lb, ex.x_ub));
    let cdf = affqetu_profiling::CdfProfile { bounds_x, ..cdf };
    dir.write("cdf.csv", cdf.to_csv())?;
    let eigen_x: Vec<f64> = sys.eigenvalues().iter().map(|&l| to_x(&sys.bounds, l)).collect();
    dir.write_json(
        "report.json",
        &json!({
            "bounds_in": sys.bounds,
            "extraction": extraction.as_ref().ok(),
            "imag_residual": cdf.imag_residual,
            "eigenvalues_x": eigen_x,
        }),
    )?;
    extraction.map(|_| ()).map_err(CliError::from)
}

#[derive(Serialize)]
struct EstimateRecord {
    #[serde(flatten)]
    estimate: Estimate,
    exact_lambda0: f64,
    abs_error: f64,
    config: serde_json::Value,
}

#[derive(Serialize)]
struct EstimateReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    preparation: Option<RunReport>,
    ground_overlap: f64,
    estimates: Vec<EstimateRecord>,
}

pub fn estimate(config: &ExperimentConfig, method: Method, dir: &mut RunDir) -> Result<(), CliError> {
    let e = &config.estimate;
    let sys = System::new(config)?;
    let noise = config.noise()?;
    let exec = config.execution.mode;
    if exec == ExecMode::Exact && !noise.is_noiseless() {
        return Err(CliError::Config("exact mode is noiseless; use trotter mode for p2 > 0".into()));
    }
    let initial = sys.initial_state(config.state, config.seed);
    let preparation = match e.prepare {
        Preparation::None => None,
        Preparation::Aff => Some(run_aff(&config.aff_config()?, &initial)?),
        Preparation::Static => Some(run_static(&config.aff_config()?, config.static_run.repetitions, &initial)?),
    };
    let state = preparation.as_ref().map_or(initial, |r| r.final_state.clone());
    let decomp = sys.h.decomposition().expect("computed in System::new");
    let lambda0 = sys.eigenvalues()[0];
    let overlap = affqetu_aff::ground_overlap(decomp, &state)?;
    let mode = match (exec, e.exact_moments) {
        (ExecMode::Exact, true) => EstimatorMode::Exact,
        (ExecMode::Exact, false) => EstimatorMode::Sampled,
        (ExecMode::Trotter, _) => EstimatorMode::Trotter,
    };
    let time_scale = e.time_scale.unwrap_or(match exec {
        ExecMode::Exact => 1.0,
        ExecMode::Trotter => PI / sys.bounds.width(),
    });
    let trotter = TrotterOptions { order: e.trotter_order, max_dt: e.max_dt };
    let tfim = (exec == ExecMode::Trotter).then_some(sys.params);
    let record = |est: Estimate, cfg: serde_json::Value| EstimateRecord {
        abs_error: (est.value - lambda0).abs(),
        estimate: est,
        exact_lambda0: lambda0,
        config: cfg,
    };
    let dem = |seed: u64| -> Result<EstimateRecord, CliError> {
        let value = if e.exact_moments && exec == ExecMode::Exact {
            dem_exact(&state, &sys.params)?
        } else {
            dem_energy(&state, &sys.params, &ShotBudget::new(e.dem_shots, seed).map_err(config_err)?, &noise)?
        };
        let shots = if e.exact_moments && exec == ExecMode::Exact { 0 } else { e.dem_shots };
        let est = Estimate { method: Method::Dem, value, stages: vec![value], shots, t_max: 0.0 };
        Ok(record(est, json!({ "shots": e.dem_shots, "noise": noise })))
    };
    let mut estimates = Vec::new();
    match method {
        Method::Dem => estimates.push(dem(config.seed)?),
        Method::Rpe => {
            let theta_prev = match e.theta_prev {
                Some(t) => t,
                None => {
                    let d = dem(config.seed)?;
                    let v = d.estimate.value;
                    estimates.push(d);
                    v
                }
            };
            let cfg = RpeConfig {
                theta_prev,
                depth: e.rpe_depth,
                shots: e.shots,
                noise,
                mode,
                time_scale,
                trotter,
                tfim,
                max_trajectories: config.execution.max_trajectories,
                seed: config.seed,
            };
            let est = rpe_estimate(&state, &sys.h, &cfg)?;
            estimates.push(record(est, serde_json::to_value(&cfg).expect("config serializes")));
        }
        Method::Qcels => {
            let cfg = QcelsConfig {
                lambda_lb: e.lambda_lb.unwrap_or(sys.bounds.lambda_lb),
                lambda_ub: e.lambda_ub.unwrap_or(sys.bounds.lambda_ub),
                stages: e.qcels_stages,
                shots: e.shots,
                samples: e.samples,
                tau: e.tau,
                noise,
                mode,
                time_scale,
                trotter,
                tfim,
                max_trajectories: config.execution.max_trajectories,
                seed: config.seed,
            };
            let est = qcels_estimate(&state, &sys.h, &cfg)?;
            estimates.push(record(est, serde_json::to_value(&cfg).expect("config serializes")));
        }
    }
    if let Some(r) = &preparation {
        write_run(dir, r)?;
        dir.write("preparation_report.json", {
            let mut s = serde_json::to_string_pretty(r).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        })?;
    }
    let mut csv = Csv::new(&["method", "stage", "value", "abs_error"]);
    for r in &estimates {
        let name = serde_json::to_value(r.estimate.method).expect("method serializes");
        for (j, v) in r.estimate.stages.iter().enumerate() {
            csv.row(&[name.as_str().unwrap_or_default().to_string(), j.to_string(), num(*v), num((v - lambda0).abs())]);
        }
    }
    dir.write("estimates.csv", csv.into_string())?;
    dir.write_json(
        "report.json",
        &EstimateReport { preparation: preparation.clone(), ground_overlap: overlap, estimates },
    )
}

pub fn theory(config: &ExperimentConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let t = &config.theory;
    if !(0.0 < t.lt0 && t.lt0 < t.lt1) {
        return Err(CliError::Config(format!("need 0 < lt0 < lt1, got ({}, {})", t.lt0, t.lt1)));
    }
    if !(0.0 < t.gamma_lo && t.gamma_lo < t.gamma_hi) || t.points < 2 {
        return Err(CliError::Config("need 0 < gamma_lo < gamma_hi and at least 2 points".into()));
    }
    let mut csv = Csv::new(&["gamma", "stretched_gap", "gamma_tilde", "local_exponent"]);
    for p in stretch_scan(t.lt0, t.lt1, t.gamma_lo, t.gamma_hi, t.points) {
        csv.row(&[num(p.gamma), num(p.stretched_gap), num(p.gamma_tilde), num(local_exponent(p.gamma, t.lt0, t.lt1))]);
    }
    dir.write("stretch.csv", csv.into_string())?;

    let slope_on = |lo: f64, hi: f64| {
        let pts = stretch_scan(t.lt0, t.lt1, lo, hi, 200);
        let xs: Vec<f64> = pts.iter().map(|p| p.gamma).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.stretched_gap).collect();
        loglog_slope(&xs, &ys)
    };
    let window = linear_regime_window(t.lt0, t.lt1);
    let mut pred = Csv::new(&["a0", "delta_a", "eps", "gamma_static", "gamma_aff"]);
    for &da in &t.delta_a {
        for &eps in &t.eps {
            let gs = gamma_static_prediction(t.a0, da, eps)?;
            let ga = gamma_aff_prediction(t.a0, da, eps)?;
            pred.row(&[num(t.a0), num(da), num(eps), num(gs), num(ga)]);
        }
    }
    dir.write("predictions.csv", pred.into_string())?;
    dir.write_json(
        "report.json",
        &json!({
            "lt0": t.lt0,
            "lt1": t.lt1,
            "quadratic_regime": { "gamma": [1.0, 10.0], "slope": slope_on(1.0, 10.0) },
            "linear_regime": window.map(|(lo, hi)| json!({ "gamma": [lo, hi], "slope": slope_on(lo, hi) })),
        }),
    )
}
