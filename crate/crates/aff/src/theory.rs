//! Closed-form depth predictions for static repetition and AFF, and the
//! relation between the stretch in eigenvalue space (`gamma`) and in cosine
//! space (`gamma~ Delta_a`).

use crate::{AffError, Result};

fn check(a0: f64, delta_a: f64, eps_t: f64) -> Result<()> {
    if !(0.0 < delta_a && delta_a < a0 && a0 <= 1.0) {
        return Err(AffError::BadParameters(format!("need 0 < Delta_a < a0 <= 1, got a0 = {a0}, Delta_a = {delta_a}")));
    }
    if !(0.0 < eps_t && eps_t < 1.0) {
        return Err(AffError::BadParameters(format!("need 0 < eps~ < 1, got {eps_t}")));
    }
    Ok(())
}

/// Repetitions needed by static QETU: `(a0 / Delta_a) ln(a0 / (Delta_a eps~))`.
pub fn gamma_static_prediction(a0: f64, delta_a: f64, eps_t: f64) -> Result<f64> {
    check(a0, delta_a, eps_t)?;
    Ok(a0 / delta_a * (a0 / (delta_a * eps_t)).ln())
}

/// Cosine-space stretch needed by one AFF stage: `a0 / Delta_a - eps~`.
pub fn gamma_aff_prediction(a0: f64, delta_a: f64, eps_t: f64) -> Result<f64> {
    check(a0, delta_a, eps_t)?;
    Ok(a0 / delta_a - eps_t)
}

/// `gamma~ Delta_a = cos(gamma lt0 / 2) - cos(gamma lt1 / 2)`.
pub fn stretch_relation(gamma: f64, lt0: f64, lt1: f64) -> f64 {
    if !(0.0 < lt0 && lt0 < lt1 && gamma * lt1 < std::f64::consts::PI) {
        log::debug!("stretch_relation outside the monotone regime: gamma = {gamma}, lt = ({lt0}, {lt1})");
    }
    (0.5 * gamma * lt0).cos() - (0.5 * gamma * lt1).cos()
}

/// Worst-case number of initial filtering stages, `ceil(log_ell N)`.
pub fn worst_case_stages(n: usize, ell: f64) -> usize {
    let x = (n as f64).ln() / ell.ln();
    // log_2 64 evaluates to 6 plus one ulp
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Local exponent `d ln(gamma~ Delta_a) / d ln gamma`.
pub fn local_exponent(gamma: f64, lt0: f64, lt1: f64) -> f64 {
    // f = 2 sin(gamma s) sin(gamma d) with s = (lt0 + lt1)/4, d = (lt1 - lt0)/4
    let (s, d) = (0.25 * (lt0 + lt1), 0.25 * (lt1 - lt0));
    let cot = |u: f64| u.cos() / u.sin();
    gamma * s * cot(gamma * s) + gamma * d * cot(gamma * d)
}

/// Window `[0.85 g*, 1.15 g*]` around the first `g*` where the local exponent
/// drops to one: the regime in which `gamma~ Delta_a` grows linearly in `gamma`.
pub fn linear_regime_window(lt0: f64, lt1: f64) -> Option<(f64, f64)> {
    // the exponent falls from 2 at gamma -> 0 and reaches 0 at the maximum of f
    let top = 2.0 * std::f64::consts::PI / (lt0 + lt1);
    if local_exponent(top, lt0, lt1) > 1.0 {
        return None;
    }
    let (mut lo, mut hi) = (1e-9 * top, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if local_exponent(mid, lt0, lt1) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = 0.5 * (lo + hi);
    Some((0.85 * g, 1.15 * g))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchPoint {
    pub gamma: f64,
    /// `gamma~ Delta_a`.
    pub stretched_gap: f64,
    /// `gamma~`, normalized by the unstretched gap `Delta_a` at `gamma = 1`.
    pub gamma_tilde: f64,
}

/// `gamma~ Delta_a` and `gamma~` on `n` log-spaced `gamma` in `[g_lo, g_hi]`.
pub fn stretch_scan(lt0: f64, lt1: f64, g_lo: f64, g_hi: f64, n: usize) -> Vec<StretchPoint> {
    let base = stretch_relation(1.0, lt0, lt1);
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            let gamma = g_lo * (g_hi / g_lo).powf(t);
            let f = stretch_relation(gamma, lt0, lt1);
            StretchPoint { gamma, stretched_gap: f, gamma_tilde: f / base }
        })
        .collect()
}
