use std::f64::consts::PI;

use affqetu_circuit::{NoiseModel, ShotBudget};
use affqetu_estimators::{
    dem_energy, dem_energy_ensemble, dem_exact, dem_variance, qcels_estimate, qcels_fit, qcels_objective,
    rpe_estimate, rpe_estimate_ensemble, rpe_update, Ensemble, Estimate, EstimatorError, EstimatorMode, Method,
    QcelsConfig, RpeConfig,
};
use affqetu_hamiltonian::{build_tfim, TfimParams};
use affqetu_linalg::{normalized, DenseMatrix, HermitianOperator, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); dim];
    v[i] = c(1.0);
    v
}

fn random_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    normalized(&(0..dim).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect::<Vec<_>>())
}

fn diag(vals: &[f64]) -> HermitianOperator {
    HermitianOperator::new(DenseMatrix::diagonal(&vals.iter().map(|&v| c(v)).collect::<Vec<_>>())).unwrap()
}

fn ground(params: &TfimParams) -> (HermitianOperator, f64, Vec<C64>) {
    let h = build_tfim(params).unwrap();
    let d = h.decomposition().unwrap();
    let (l0, psi) = (d.eigenvalues()[0], d.eigenvector(0).to_vec());
    (h, l0, psi)
}

#[test]
fn dem_product_states() {
    let p = TfimParams::open(6, 1.0, 1.0);
    let zero = basis(64, 0);
    let plus = vec![c(0.125); 64];
    assert!((dem_exact(&zero, &p).unwrap() + 5.0).abs() < 1e-12);
    assert!((dem_exact(&plus, &p).unwrap() + 6.0).abs() < 1e-12);
    let nl = NoiseModel::noiseless();
    let shots = ShotBudget::new(100_000, 3).unwrap();
    for (state, e) in [(&zero, -5.0), (&plus, -6.0)] {
        let sigma = dem_variance(state, &p, shots.total_shots).unwrap().sqrt();
        let est = dem_energy(state, &p, &shots, &nl).unwrap();
        assert!((est - e).abs() <= 4.0 * sigma + 1e-12, "{est} vs {e}, sigma {sigma}");
    }
    // |+> has ZZ variance 5 per shot; |0..0> has none
    assert!(dem_variance(&zero, &p, 2).unwrap() - 6.0 < 1e-12);
}

#[test]
fn dem_on_ground_state_within_three_sigma_band() {
    let p = TfimParams::periodic(6, 1.0, 1.0);
    let (_, l0, psi) = ground(&p);
    assert!((l0 + 7.7274).abs() < 1e-3);
    let sigma = dem_variance(&psi, &p, 10_000).unwrap().sqrt();
    assert!(3.0 * sigma <= 0.15, "sigma {sigma}");
    let e = dem_energy(&psi, &p, &ShotBudget::new(10_000, 11).unwrap(), &NoiseModel::noiseless()).unwrap();
    assert!((e - l0).abs() <= 0.15, "{e}");
}

#[test]
fn dem_is_unbiased() {
    let p = TfimParams::open(4, 1.0, 0.7);
    let psi = random_state(16, 5);
    let exact = dem_exact(&psi, &p).unwrap();
    let sigma = dem_variance(&psi, &p, 500).unwrap().sqrt();
    let nl = NoiseModel::noiseless();
    let mean: f64 =
        (0..100).map(|s| dem_energy(&psi, &p, &ShotBudget::new(500, s).unwrap(), &nl).unwrap()).sum::<f64>() / 100.0;
    assert!((mean - exact).abs() <= 4.0 * sigma / 10.0, "{mean} vs {exact}");
}

#[test]
fn dem_noise_only_touches_x_terms() {
    let p = TfimParams::open(3, 1.0, 1.0);
    let zero = basis(8, 0);
    let noisy = NoiseModel::with_p1(0.0, 0.5).unwrap();
    let e = dem_energy(&zero, &p, &ShotBudget::new(4000, 1).unwrap(), &noisy).unwrap();
    // ZZ part stays exactly -2; depolarized X samples stay centered on 0
    let sigma = (3.0f64 / 2000.0).sqrt();
    assert!((e + 2.0).abs() < 4.0 * sigma, "{e}");
    let r = dem_energy(&zero, &TfimParams::open(2, 1.0, 1.0), &ShotBudget::new(1, 0).unwrap(), &noisy);
    assert!(r.is_err());
}

#[test]
fn dem_is_deterministic_per_seed() {
    let p = TfimParams::open(4, 1.0, 1.0);
    let psi = random_state(16, 9);
    let noise = NoiseModel::new(0.01).unwrap();
    let run = |s| dem_energy(&psi, &p, &ShotBudget::new(300, s).unwrap(), &noise).unwrap();
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
}

#[test]
fn rpe_on_single_eigenstate_is_exact() {
    let h = diag(&[0.3, 1.1]);
    let e0 = basis(2, 0);
    let est = rpe_estimate(&e0, &h, &RpeConfig::new(0.25, 5, 1)).unwrap();
    assert!((est.value - 0.3).abs() < 1e-12, "{}", est.value);
    assert_eq!(est.method, Method::Rpe);
    assert_eq!(est.stages.len(), 5);
    assert_eq!(est.shots, 0);
    assert_eq!(est.t_max, 16.0);
}

#[test]
fn rpe_single_stage_takes_nearest_branch() {
    let h = diag(&[2.0 * PI + 0.4, 5.0]);
    let e0 = basis(2, 0);
    // arg Z_0 = 0.4; the wrap-nearest representative to 6.5 is 2 pi + 0.4
    let est = rpe_estimate(&e0, &h, &RpeConfig::new(6.5, 1, 1)).unwrap();
    assert!((est.value - (2.0 * PI + 0.4)).abs() < 1e-12);
    let est = rpe_estimate(&e0, &h, &RpeConfig::new(0.0, 1, 1)).unwrap();
    assert!((est.value - 0.4).abs() < 1e-12);
}

#[test]
fn rpe_error_stays_under_halving_bound_on_mixed_state() {
    let p = TfimParams::periodic(6, 1.0, 1.0);
    let (h, l0, psi0) = ground(&p);
    let d = h.decomposition().unwrap();
    // ground weight 0.9 with the rest spread over the first excited states
    let mut psi: Vec<C64> = psi0.iter().map(|a| a * 0.9f64.sqrt()).collect();
    for (k, w) in [(1, 0.06), (2, 0.03), (5, 0.01)] {
        for (x, v) in psi.iter_mut().zip(d.eigenvector(k)) {
            *x += v * f64::sqrt(w);
        }
    }
    let psi = normalized(&psi);
    let est = rpe_estimate(&psi, &h, &RpeConfig::new(l0 + 0.3, 12, 1)).unwrap();
    let errs: Vec<f64> = est.stages.iter().map(|t| (t - l0).abs()).collect();
    // |arg Z_j - 2^j l0| <= asin(0.1 / 0.9), shared over 2^j
    let bound = (0.1f64 / 0.9).asin();
    for (j, e) in errs.iter().enumerate() {
        assert!(*e <= bound / 2f64.powi(j as i32) + 1e-12, "stage {j}: {e}");
    }
}

#[test]
fn rpe_and_qcels_exact_on_l6_ground_state() {
    let p = TfimParams::periodic(6, 1.0, 1.0);
    let (h, l0, psi) = ground(&p);
    let rpe = rpe_estimate(&psi, &h, &RpeConfig::new(l0 + 0.2, 8, 1)).unwrap();
    assert!((rpe.value - l0).abs() < 1e-6, "{}", rpe.value);
    let qc = qcels_estimate(&psi, &h, &QcelsConfig::new(-12.6, 12.6, 1)).unwrap();
    assert!((qc.value - l0).abs() < 1e-6, "{}", qc.value);
    assert!((qc.t_max - 4.0 * 0.2 * 256.0).abs() < 1e-12);
}

#[test]
fn rescaled_time_gives_same_energy() {
    let p = TfimParams::periodic(4, 1.0, 1.0);
    let (h, l0, psi) = ground(&p);
    let mut rc = RpeConfig::new(l0 + 0.1, 8, 1);
    rc.time_scale = PI / 10.0;
    assert!((rpe_estimate(&psi, &h, &rc).unwrap().value - l0).abs() < 1e-9);
    let mut qc = QcelsConfig::new(-8.0, 8.0, 1);
    qc.time_scale = PI / 10.0;
    assert!((qcels_estimate(&psi, &h, &qc).unwrap().value - l0).abs() < 1e-9);
}

#[test]
fn sampled_estimators_reach_shot_noise_floor() {
    let p = TfimParams::periodic(6, 1.0, 1.0);
    let (h, l0, psi) = ground(&p);
    let mut rc = RpeConfig::new(l0 + 0.1, 8, 10_000);
    rc.mode = EstimatorMode::Sampled;
    rc.seed = 2;
    let r = rpe_estimate(&psi, &h, &rc).unwrap();
    assert!((r.value - l0).abs() < 2e-3, "{}", r.value);
    assert_eq!(r.shots, 8 * 10_000);
    let mut qc = QcelsConfig::new(-12.6, 12.6, 10_000);
    qc.mode = EstimatorMode::Sampled;
    qc.seed = 2;
    let q = qcels_estimate(&psi, &h, &qc).unwrap();
    assert!((q.value - l0).abs() < 2e-3, "{}", q.value);
    assert_eq!(q.shots, 9 * 5 * 10_000);
}

#[test]
fn qcels_two_point_closed_form() {
    let h = diag(&[0.7, 2.9]);
    let psi = normalized(&[c(0.9), c(0.3)]);
    let tau = 0.3;
    let mut cfg = QcelsConfig::new(-2.0, 6.0, 1);
    cfg.samples = 2;
    cfg.stages = 1;
    cfg.tau = tau;
    let est = qcels_estimate(&psi, &h, &cfg).unwrap();
    let d = h.decomposition().unwrap();
    let z: Vec<C64> = (0..2)
        .map(|n| {
            let ev = d.apply_function(&psi, |l| C64::from_polar(1.0, -(n as f64) * tau * l)).unwrap();
            psi.iter().zip(&ev).map(|(a, b)| a.conj() * b).sum()
        })
        .collect();
    let raw = -(z[1] * z[0].conj()).arg() / tau;
    let period = 2.0 * PI / tau;
    let expected = raw + period * ((cfg.lambda_lb - raw) / period).ceil();
    assert!(expected >= cfg.lambda_lb && expected <= cfg.lambda_ub);
    assert!((est.value - expected).abs() < 1e-8, "{} vs {expected}", est.value);
}

#[test]
fn trotter_mode_tracks_exact_without_noise() {
    let p = TfimParams::periodic(4, 1.0, 1.0);
    let (h, l0, psi) = ground(&p);
    let mut rc = RpeConfig::new(l0 + 0.1, 6, 100_000);
    rc.mode = EstimatorMode::Trotter;
    rc.time_scale = PI / 10.0;
    rc.tfim = Some(p.clone());
    let r = rpe_estimate(&psi, &h, &rc).unwrap();
    assert!((r.value - l0).abs() < 5e-3, "{}", r.value);
}

#[test]
fn configs_are_validated() {
    let h = diag(&[0.0, 1.0]);
    let e0 = basis(2, 0);
    let bad = |r: Result<Estimate, EstimatorError>| assert!(matches!(r, Err(EstimatorError::BadConfig(_))), "{r:?}");
    bad(rpe_estimate(&e0, &h, &RpeConfig::new(0.0, 0, 1)));
    bad(rpe_estimate(&e0, &h, &RpeConfig::new(0.0, 3, 0)));
    let mut rc = RpeConfig::new(0.0, 3, 10);
    rc.mode = EstimatorMode::Trotter;
    bad(rpe_estimate(&e0, &h, &rc));
    let mut rc = RpeConfig::new(0.0, 3, 10);
    rc.noise = NoiseModel::new(1e-3).unwrap();
    bad(rpe_estimate(&e0, &h, &rc));
    rc.noise = NoiseModel::noiseless();
    rc.time_scale = 0.0;
    bad(rpe_estimate(&e0, &h, &rc));
    bad(rpe_estimate(&basis(4, 0), &h, &RpeConfig::new(0.0, 3, 1)));
    let mut qc = QcelsConfig::new(1.0, 1.0, 1);
    bad(qcels_estimate(&e0, &h, &qc));
    qc.lambda_ub = 2.0;
    qc.samples = 1;
    bad(qcels_estimate(&e0, &h, &qc));
    qc.samples = 5;
    qc.tau = -0.2;
    bad(qcels_estimate(&e0, &h, &qc));
}

#[test]
fn configs_round_trip_and_reject_unknown_keys() {
    let mut rc = RpeConfig::new(-7.5, 8, 10_000);
    rc.tfim = Some(TfimParams::periodic(6, 1.0, 1.0));
    let js = serde_json::to_string(&rc).unwrap();
    assert!(js.contains("\"J\":8") && js.contains("\"N_S\":10000"));
    assert_eq!(serde_json::from_str::<RpeConfig>(&js).unwrap(), rc);
    let qc = QcelsConfig::new(-10.0, 0.0, 100);
    let js = serde_json::to_string(&qc).unwrap();
    assert_eq!(serde_json::from_str::<QcelsConfig>(&js).unwrap(), qc);
    let extra = js.replacen('{', "{\"bogus\":1,", 1);
    assert!(serde_json::from_str::<QcelsConfig>(&extra).is_err());
}

#[test]
fn ensembles_mix_members() {
    assert!(Ensemble::new(vec![]).is_err());
    assert!(Ensemble::new(vec![basis(2, 0), basis(4, 0)]).is_err());
    assert!(Ensemble::new(vec![vec![c(2.0), c(0.0)]]).is_err());
    let ens = Ensemble::new(vec![basis(2, 0), basis(2, 1), basis(2, 0)]).unwrap();
    assert_eq!(ens.split(10), vec![4, 3, 3]);

    let p = TfimParams::open(4, 1.0, 1.0);
    let zero = basis(16, 0);
    let plus = vec![c(0.25); 16];
    let ens = Ensemble::new(vec![zero.clone(), plus.clone()]).unwrap();
    let shots = ShotBudget::new(40_000, 8).unwrap();
    let e = dem_energy_ensemble(&ens, &p, &shots, &NoiseModel::noiseless()).unwrap();
    let exact = 0.5 * (dem_exact(&zero, &p).unwrap() + dem_exact(&plus, &p).unwrap());
    assert!((e - exact).abs() < 0.05, "{e} vs {exact}");

    // a minority excited member shrinks the contrast but not the ground phase
    let q = TfimParams::periodic(4, 1.0, 1.0);
    let h = build_tfim(&q).unwrap();
    let d = h.decomposition().unwrap();
    let l0 = d.eigenvalues()[0];
    let ens = Ensemble::new(vec![d.eigenvector(0).to_vec(), d.eigenvector(0).to_vec(), d.eigenvector(3).to_vec()])
        .unwrap();
    let est = rpe_estimate_ensemble(&ens, &h, &RpeConfig::new(l0 + 0.2, 10, 1)).unwrap();
    // weights 2/3 and 1/3 tilt arg Z_j by at most asin(1/2)
    assert!((est.value - l0).abs() <= 0.5f64.asin() / 2f64.powi(9), "{} vs {l0}", est.value);
}

fn brute_force(z: &[C64], tau: f64, lb: f64, ub: f64, n: usize) -> f64 {
    (0..n)
        .map(|i| lb + (ub - lb) * i as f64 / (n - 1) as f64)
        .min_by(|a, b| qcels_objective(z, tau, *a).partial_cmp(&qcels_objective(z, tau, *b)).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rpe_on_eigenstate_never_loses_accuracy(theta in -9.0f64..9.0, offset in -1.5f64..1.5, depth in 1u32..12) {
        let h = diag(&[theta, theta + 2.0]);
        let est = rpe_estimate(&basis(2, 0), &h, &RpeConfig::new(theta + offset, depth, 1)).unwrap();
        let errs: Vec<f64> = est.stages.iter().map(|t| (t - theta).abs()).collect();
        for (j, e) in errs.iter().enumerate() {
            prop_assert!(*e < 1e-11, "stage {}: {:?}", j, errs);
        }
    }

    #[test]
    fn rpe_update_is_the_nearest_lattice_point(prev in -20.0f64..20.0, arg in -PI..PI, j in 0u32..8) {
        let k = (1u64 << j) as f64;
        let got = rpe_update(prev, arg, j);
        let closed = prev + ((arg - k * prev + PI).rem_euclid(2.0 * PI) - PI) / k;
        prop_assert!((got - closed).abs() < 1e-9);
        prop_assert!((got - prev).abs() <= PI / k + 1e-9);
    }

    #[test]
    fn qcels_fit_matches_dense_grid(
        theta0 in -3.0f64..3.0,
        tau in 0.1f64..1.0,
        amp in 0.3f64..1.0,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<C64> = (0..5)
            .map(|n| {
                let noise = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.3;
                C64::from_polar(amp, -theta0 * n as f64 * tau) + noise
            })
            .collect();
        let (lb, ub) = (theta0 - PI / (2.0 * tau) * 1.7, theta0 + PI / (2.0 * tau) * 1.3);
        let n = 200_001;
        let res = (ub - lb) / (n - 1) as f64;
        let brute = brute_force(&z, tau, lb, ub, n);
        let (fit, r) = qcels_fit(&z, tau, lb, ub);
        prop_assert!(qcels_objective(&z, tau, fit) <= qcels_objective(&z, tau, brute) + 1e-12);
        prop_assert!((fit - brute).abs() <= res, "fit {fit} brute {brute} res {res}");
        // r* is the minimizer over r for the returned theta
        let f = |rr: C64| z.iter().enumerate()
            .map(|(k, zk)| (zk - rr * C64::from_polar(1.0, -fit * k as f64 * tau)).norm_sqr()).sum::<f64>() / 5.0;
        prop_assert!((f(r) - qcels_objective(&z, tau, fit)).abs() < 1e-12);
        prop_assert!(f(r) <= f(r + C64::new(1e-3, -1e-3)));
    }
}
