use std::f64::consts::FRAC_PI_2;
use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{FilterError, Result, StepPolynomial};

const SYMMETRY_TOL: f64 = 1e-9;

/// Symmetric phase sequence `(phi_0, ..., phi_eta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QspPhases {
    pub phases: Vec<f64>,
}

impl QspPhases {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        let n = phases.len();
        let dev = (0..n).map(|k| (phases[k] - phases[n - 1 - k]).abs()).fold(0.0, f64::max);
        if dev > SYMMETRY_TOL {
            return Err(FilterError::AsymmetricPhases(dev));
        }
        Ok(Self { phases })
    }

    pub fn degree(&self) -> usize {
        self.phases.len().saturating_sub(1)
    }
}

/// `<0| e^{i phi_0 X} V^dag e^{i phi_1 X} V e^{i phi_2 X} ... |0>` with
/// `V = diag(1, e^{-i lambda~})` and `a = cos(lambda~ / 2)`.
pub fn qsp_amplitude(phases: &QspPhases, a: f64) -> C64 {
    let lt = 2.0 * a.clamp(-1.0, 1.0).acos();
    let v = C64::from_polar(1.0, -lt);
    let ph = &phases.phases;
    let (s, c) = ph[0].sin_cos();
    let (mut u0, mut u1) = (C64::new(c, 0.0), C64::new(0.0, s));
    for (k, &phi) in ph.iter().enumerate().skip(1) {
        u1 *= if k % 2 == 1 { v.conj() } else { v };
        let (s, c) = phi.sin_cos();
        let is = C64::new(0.0, s);
        (u0, u1) = (u0 * c + u1 * is, u0 * is + u1 * c);
    }
    u0
}

/// Real part of [`qsp_amplitude`].
pub fn qsp_response(phases: &QspPhases, a: f64) -> f64 {
    qsp_amplitude(phases, a).re
}

#[derive(Clone, Debug)]
pub struct PhaseOptions {
    pub tolerance: f64,
    pub check_points: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, check_points: 500, restarts: 50, max_iterations: 400, seed: 0x51ed }
    }
}

pub fn find_phases(poly: &StepPolynomial) -> Result<QspPhases> {
    find_phases_with(poly, &PhaseOptions::default())
}

/// Fits the free half of a symmetric phase sequence by Levenberg-Marquardt.
///
/// The fit runs in the reflection convention `e^{i psi_0 Z} prod W(x) e^{i psi_k Z}`
/// with `W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]]`, where the target
/// is matched at `eta/2 + 1` Chebyshev nodes, then mapped to circuit phases.
pub fn find_phases_with(poly: &StepPolynomial, opts: &PhaseOptions) -> Result<QspPhases> {
    let eta = poly.degree;
    if eta % 2 != 0 || eta < 2 {
        return Err(FilterError::BadDegree(eta));
    }
    let n = eta / 2 + 1;
    let nodes: Vec<f64> = (1..=n).map(|k| (std::f64::consts::PI * (k as f64 - 0.5) / (2.0 * n as f64)).cos()).collect();
    let target: Vec<f64> = nodes.iter().map(|&x| poly.value(x)).collect();
    let check: Vec<f64> = (0..opts.check_points).map(|i| i as f64 / (opts.check_points - 1) as f64).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::INFINITY;
    for attempt in 0..=opts.restarts {
        let h0: Vec<f64> = if attempt == 0 {
            let mut h = vec![0.0; n];
            h[0] = FRAC_PI_4;
            h
        } else {
            (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
        };
        let h = levenberg_marquardt(h0, &nodes, &target, eta, opts.max_iterations);
        let phases = QspPhases { phases: to_circuit_phases(&mirror(&h, eta), eta) };
        let residual = check.iter().map(|&a| (qsp_response(&phases, a) - poly.value(a)).abs()).fold(0.0, f64::max);
        if residual <= opts.tolerance {
            return Ok(phases);
        }
        best = best.min(residual);
    }
    Err(FilterError::PhaseOptimizationFailed { residual: best, attempts: opts.restarts + 1 })
}

fn mirror(h: &[f64], eta: usize) -> Vec<f64> {
    (0..=eta).map(|k| h[k.min(eta - k)]).collect()
}

/// Maps reflection-convention phases to the alternating `V^dag, V` circuit.
fn to_circuit_phases(psi: &[f64], eta: usize) -> Vec<f64> {
    let edge = if eta % 4 == 2 { -FRAC_PI_4 } else { FRAC_PI_4 };
    psi.iter().enumerate().map(|(k, &p)| if k == 0 || k == eta { -(p + edge) } else { -(p + FRAC_PI_2) }).collect()
}

fn wx_response(psi: &[f64], x: f64) -> f64 {
    let s = C64::new(0.0, (1.0 - x * x).max(0.0).sqrt());
    let mut u0 = C64::from_polar(1.0, psi[0]);
    let mut u1 = C64::new(0.0, 0.0);
    for &p in &psi[1..] {
        (u0, u1) = (u0 * x + u1 * s, u0 * s + u1 * x);
        let e = C64::from_polar(1.0, p);
        u0 *= e;
        u1 *= e.conj();
    }
    u0.re
}

fn residuals(h: &[f64], nodes: &[f64], target: &[f64], eta: usize) -> DVector<f64> {
    let psi = mirror(h, eta);
    DVector::from_iterator(nodes.len(), nodes.iter().zip(target).map(|(&x, &t)| wx_response(&psi, x) - t))
}

fn levenberg_marquardt(mut h: Vec<f64>, nodes: &[f64], target: &[f64], eta: usize, max_iter: usize) -> Vec<f64> {
    let n = h.len();
    let mut r = residuals(&h, nodes, target, eta);
    let mut cost = r.norm_squared();
    let mut damping = 1e-3;
    for _ in 0..max_iter {
        if r.amax() < 1e-14 {
            break;
        }
        let step = 1e-7;
        let mut jac = DMatrix::zeros(nodes.len(), n);
        for j in 0..n {
            let mut hp = h.clone();
            let mut hm = h.clone();
            hp[j] += step;
            hm[j] -= step;
            let d = (residuals(&hp, nodes, target, eta) - residuals(&hm, nodes, target, eta)) / (2.0 * step);
            jac.set_column(j, &d);
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += damping * jtj[(i, i)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&jtr)) else {
                damping *= 4.0;
                continue;
            };
            let trial: Vec<f64> = h.iter().zip(delta.iter()).map(|(x, d)| x + d).collect();
            let rt = residuals(&trial, nodes, target, eta);
            let ct = rt.norm_squared();
            if ct < cost {
                h = trial;
                r = rt;
                cost = ct;
                damping = (damping / 3.0).max(1e-15);
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    h
}
