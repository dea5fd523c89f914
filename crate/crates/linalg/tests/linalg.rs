use affqetu_linalg::{
    apply_gate, eigh, evolve_exact, fidelity, inner, kron, norm, normalized, paulis, DenseMatrix, LinalgError, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_hermitian(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn random_state(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    normalized(&(0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>())
}

fn tfim_l2() -> DenseMatrix {
    let zz = kron(&paulis::z(), &paulis::z());
    let x0 = kron(&paulis::id(), &paulis::x());
    let x1 = kron(&paulis::x(), &paulis::id());
    zz.scale(c(-1.0, 0.0)).sub(&x0).unwrap().sub(&x1).unwrap()
}

#[test]
fn eigh_diagonal_input() {
    let d = eigh(&DenseMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
    assert_eq!(d.eigenvalues(), &[1.0, 3.0]);
}

#[test]
fn eigh_pauli_x() {
    let d = eigh(&paulis::x()).unwrap();
    assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-14);
    assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-14);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let minus = [c(s, 0.0), c(-s, 0.0)];
    let plus = [c(s, 0.0), c(s, 0.0)];
    assert!((fidelity(d.eigenvector(0), &minus) - 1.0).abs() < 1e-12);
    assert!((fidelity(d.eigenvector(1), &plus) - 1.0).abs() < 1e-12);
}

#[test]
fn eigh_tfim_two_sites() {
    let d = eigh(&tfim_l2()).unwrap();
    assert!((d.eigenvalues()[0] + 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn eigh_rejects_non_hermitian() {
    let m = DenseMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(eigh(&m), Err(LinalgError::NonHermitian { .. })));
}

#[test]
fn eigh_matches_independent_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3usize, 8, 17, 32] {
        let h = random_hermitian(n, &mut rng);
        let ours = eigh(&h).unwrap();
        let na = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let z = h[(i, j)];
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut reference: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.eigenvalues().iter().zip(&reference) {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn evolve_identity_and_eigen_action() {
    let d = eigh(&tfim_l2()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_state(4, &mut rng);
    let same = evolve_exact(&d, 0.0, &psi).unwrap();
    for (a, b) in same.iter().zip(&psi) {
        assert!((a - b).norm() < 1e-12);
    }
    let g = d.eigenvector(0).to_vec();
    let out = evolve_exact(&d, 0.5, &g).unwrap();
    let phase = inner(&g, &out);
    let expected = C64::from_polar(1.0, 5f64.sqrt() / 2.0);
    assert!((phase - expected).norm() < 1e-12);
}

#[test]
fn evolve_rejects_wrong_dimension() {
    let d = eigh(&tfim_l2()).unwrap();
    assert!(matches!(evolve_exact(&d, 1.0, &[c(1.0, 0.0)]), Err(LinalgError::DimensionMismatch { .. })));
}

#[test]
fn gate_examples() {
    let zero2 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let flipped = apply_gate(&zero2, &paulis::x(), &[0]).unwrap();
    assert_eq!(flipped[1], c(1.0, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = random_state(8, &mut rng);
    let back = apply_gate(&apply_gate(&psi, &paulis::h(), &[1]).unwrap(), &paulis::h(), &[1]).unwrap();
    for (a, b) in back.iter().zip(&psi) {
        assert!((a - b).norm() < 1e-14);
    }

    let plus = apply_gate(&apply_gate(&zero2, &paulis::h(), &[0]).unwrap(), &paulis::h(), &[1]).unwrap();
    let out = apply_gate(&plus, &paulis::cz(), &[0, 1]).unwrap();
    let expected = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)];
    for (a, b) in out.iter().zip(&expected) {
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn gate_validation() {
    let psi = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let bad = DenseMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    assert!(matches!(apply_gate(&psi, &bad, &[0]), Err(LinalgError::NotUnitary { .. })));
    assert!(matches!(apply_gate(&psi, &paulis::x(), &[1]), Err(LinalgError::BadTargets { .. })));
    let four = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    assert!(matches!(apply_gate(&four, &paulis::cz(), &[1, 1]), Err(LinalgError::BadTargets { .. })));
}

#[test]
fn two_qubit_gate_matches_kron_convention() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let psi = random_state(4, &mut rng);
    // targets [1, 0]: qubit 1 is the more significant factor, as in the full kron.
    let g = kron(&paulis::y(), &paulis::h());
    let via_gate = apply_gate(&psi, &g, &[1, 0]).unwrap();
    let dense = g.matvec(&psi).unwrap();
    for (a, b) in via_gate.iter().zip(&dense) {
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn kron_examples() {
    let k = kron(&paulis::id(), &paulis::x());
    let expected = DenseMatrix::from_real(4, 4, &[0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]);
    assert_eq!(k, expected);
    let zz = kron(&paulis::z(), &paulis::z());
    assert_eq!(zz, DenseMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., -1., 0., 0., 0., 0., -1., 0., 0., 0., 0., 1.]));
}

#[test]
fn degenerate_grouping() {
    let d = eigh(&kron(&paulis::z(), &paulis::z())).unwrap();
    let groups = d.degenerate_groups(1e-9);
    assert_eq!(groups, vec![0..2, 2..4]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigh_reconstructs_and_is_orthonormal(seed in any::<u64>(), n in 1usize..=64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let d = eigh(&h).unwrap();
        let err = d.reconstruct().sub(&h).unwrap().max_abs();
        prop_assert!(err <= 1e-9 * h.max_abs().max(1.0), "reconstruction {err:e}");
        for w in d.eigenvalues().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for i in 0..n {
            for j in 0..n {
                let g = inner(d.eigenvector(i), d.eigenvector(j));
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - C64::new(target, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(16, &mut rng);
        let d = eigh(&h).unwrap();
        let psi = random_state(16, &mut rng);
        let two = evolve_exact(&d, t1, &evolve_exact(&d, t2, &psi).unwrap()).unwrap();
        let one = evolve_exact(&d, t1 + t2, &psi).unwrap();
        prop_assert!((norm(&one) - 1.0).abs() < 1e-10);
        for (a, b) in two.iter().zip(&one) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), q0 in 0usize..4, q1 in 0usize..4) {
        prop_assume!(q0 != q1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(16, &mut rng);
        let d = eigh(&random_hermitian(4, &mut rng)).unwrap();
        let t: f64 = rng.gen_range(0.0..2.0);
        let u = DenseMatrix::from_fn(4, 4, |i, j| {
            let mut e = vec![C64::new(0.0, 0.0); 4];
            e[j] = C64::new(1.0, 0.0);
            evolve_exact(&d, t, &e).unwrap()[i]
        });
        let out = apply_gate(&psi, &u, &[q0, q1]).unwrap();
        prop_assert!((norm(&out) - 1.0).abs() < 1e-12);
    }
}
