use std::f64::consts::PI;

use affqetu_hamiltonian::{
    build_tfim, cosine_map, cosine_map_checked, linear_transform, spectral_gaps, HamiltonianError, SpectrumBounds,
    TfimParams,
};
use affqetu_linalg::{paulis, HermitianOperator};
use proptest::prelude::*;

fn spectrum(p: &TfimParams) -> Vec<f64> {
    build_tfim(p).unwrap().decomposition().unwrap().eigenvalues().to_vec()
}

#[test]
fn periodic_ground_energies() {
    let e6 = spectrum(&TfimParams::periodic(6, 1.0, 1.0));
    assert!((e6[0] + 7.7274).abs() < 1e-3, "{}", e6[0]);
    let e8 = spectrum(&TfimParams::periodic(8, 1.0, 1.0));
    assert!((e8[0] + 10.251).abs() < 1e-2, "{}", e8[0]);
}

#[test]
fn open_chain_reference_values() {
    let e = spectrum(&TfimParams::open(2, 1.0, 1.0));
    assert!((e[0] + 5f64.sqrt()).abs() < 1e-12);
    let e = spectrum(&TfimParams::open(2, 1.0, 0.0));
    for (a, b) in e.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn exact_limits() {
    for l in 2..=6 {
        let e = spectrum(&TfimParams::open(l, 0.0, 0.7));
        assert!((e[0] + 0.7 * l as f64).abs() < 1e-10);
        let e = spectrum(&TfimParams::open(l, 1.3, 0.0));
        assert!((e[0] + 1.3 * (l - 1) as f64).abs() < 1e-10);
    }
}

#[test]
fn rejects_bad_sizes() {
    assert!(matches!(build_tfim(&TfimParams::open(13, 1.0, 1.0)), Err(HamiltonianError::TooLarge(13))));
    assert!(build_tfim(&TfimParams::open(1, 1.0, 1.0)).is_err());
    assert!(build_tfim(&TfimParams::periodic(2, 1.0, 1.0)).is_err());
}

#[test]
fn transform_examples() {
    let b = SpectrumBounds::new(-10.0, 10.0).unwrap();
    assert!(b.transform(-10.0).abs() < 1e-15);
    assert!((b.transform(10.0) - PI).abs() < 1e-15);
    let lt0 = b.transform(-7.7274);
    assert!((lt0 - 0.35699).abs() < 2e-5, "{lt0}");
    assert!((cosine_map(lt0) - 0.98411).abs() < 1e-5);
    assert!(cosine_map(PI).abs() < 1e-15);
    assert!((cosine_map(PI / 2.0) - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(SpectrumBounds::new(1.0, 1.0).is_err());

    let z = HermitianOperator::new(paulis::z()).unwrap();
    let zt = linear_transform(&z, &SpectrumBounds::new(-1.0, 1.0).unwrap()).unwrap();
    let ev = zt.decomposition().unwrap().eigenvalues().to_vec();
    assert!(ev[0].abs() < 1e-12 && (ev[1] - PI).abs() < 1e-12);
}

#[test]
fn coefficients_agree_with_transform() {
    let b = SpectrumBounds::new(-8.78, -1.43).unwrap();
    let c = b.coefficients();
    for l in [-8.0, -5.0, -2.0] {
        assert!((c.a_of(l) - cosine_map(b.transform(l))).abs() < 1e-14);
    }
}

#[test]
fn clamping_is_reported() {
    assert_eq!(cosine_map_checked(-0.5), (1.0, true));
    assert!(!cosine_map_checked(1.0).1);
}

#[test]
fn gap_diagnostics() {
    let h = build_tfim(&TfimParams::periodic(6, 1.0, 1.0)).unwrap();
    let d = h.decomposition().unwrap();
    let gaps = spectral_gaps(d, &SpectrumBounds::new(-10.0, 10.0).unwrap()).unwrap();
    assert!((gaps.delta - 0.263).abs() < 5e-3, "{}", gaps.delta);
    assert!((gaps.delta_a - 0.004).abs() < 5e-4, "{}", gaps.delta_a);
    assert!(gaps.a0 > gaps.a1);

    let h8 = build_tfim(&TfimParams::periodic(8, 1.0, 1.0)).unwrap();
    let g8 = spectral_gaps(h8.decomposition().unwrap(), &SpectrumBounds::new(-15.0, 15.0).unwrap()).unwrap();
    assert!((g8.delta_a - 0.003).abs() < 5e-4, "{}", g8.delta_a);
}

#[test]
fn fully_degenerate_spectrum_is_rejected() {
    let h = HermitianOperator::new(paulis::id()).unwrap();
    let r = spectral_gaps(h.decomposition().unwrap(), &SpectrumBounds::new(-1.0, 1.0).unwrap());
    assert_eq!(r.unwrap_err(), HamiltonianError::FullyDegenerate);
}

#[test]
fn transformed_operator_reuses_eigenvectors() {
    let h = build_tfim(&TfimParams::open(4, 1.0, 0.8)).unwrap();
    let d = h.decomposition().unwrap().clone();
    let b = SpectrumBounds::new(-6.0, 6.0).unwrap();
    let ht = linear_transform(&h, &b).unwrap();
    let fresh = affqetu_linalg::eigh(ht.matrix()).unwrap();
    for (l, lt) in d.eigenvalues().iter().zip(fresh.eigenvalues()) {
        assert!((b.transform(*l) - lt).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cosine_of_transform_decreases(lb in -20.0f64..0.0, w in 0.5f64..30.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let b = SpectrumBounds::new(lb, lb + w).unwrap();
        let (x, y) = (lb + w * u.min(v), lb + w * u.max(v));
        prop_assume!(y - x > 1e-9);
        prop_assert!(cosine_map(b.transform(x)) > cosine_map(b.transform(y)));
    }

    #[test]
    fn field_sign_leaves_spectrum_fixed(l in 2usize..=6, j in -1.5f64..1.5, g in -1.5f64..1.5, periodic in any::<bool>()) {
        prop_assume!(!(periodic && l < 3));
        let mk = |g: f64| if periodic { TfimParams::periodic(l, j, g) } else { TfimParams::open(l, j, g) };
        let a = spectrum(&mk(g));
        let b = spectrum(&mk(-g));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
