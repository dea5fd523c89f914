use std::fmt::Write as _;

use affqetu_hamiltonian::SpectrumBounds;
use affqetu_linalg::C64;
use serde::{Deserialize, Serialize};

use crate::{from_x, FourierCoefficients, ProfilingError, Result};

/// Default number of grid points on `[-1, 1]`.
pub const DEFAULT_GRID: usize = 1001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfProfile {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Largest `|Im C(x)|` of the reconstruction.
    pub imag_residual: f64,
    pub bounds_x: Option<(f64, f64)>,
}

impl CdfProfile {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// CSV with columns `x,C,C1,C2`; derivative columns are empty until computed.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,C,C1,C2\n");
        for i in 0..self.grid.len() {
            let d = |v: &[f64]| v.get(i).map(|x| format!("{x:.16e}")).unwrap_or_default();
            let _ = writeln!(s, "{:.16e},{:.16e},{},{}", self.grid[i], self.cdf[i], d(&self.d1), d(&self.d2));
        }
        s
    }
}

fn uniform_grid(g: usize) -> Vec<f64> {
    (0..g).map(|i| -1.0 + 2.0 * i as f64 / (g - 1) as f64).collect()
}

/// Term-wise sum `sum_{|k|<=D} F_k (ik)^p e^{ikx} M_k` with `M_{-k} = conj(M_k)`.
fn series(moments: &[C64], coeffs: &FourierCoefficients, x: f64, p: u32) -> C64 {
    let d = coeffs.d as i64;
    (-d..=d)
        .map(|k| {
            let m = if k >= 0 { moments[k as usize] } else { moments[(-k) as usize].conj() };
            coeffs.get(k) * C64::new(0.0, k as f64).powu(p) * C64::from_polar(1.0, k as f64 * x) * m
        })
        .sum()
}

fn check_moments(moments: &[C64], coeffs: &FourierCoefficients) -> Result<()> {
    if moments.len() < coeffs.d + 1 {
        return Err(ProfilingError::BadParameters(format!("need {} moments, got {}", coeffs.d + 1, moments.len())));
    }
    if (moments[0] - C64::new(1.0, 0.0)).norm() > 0.2 {
        return Err(ProfilingError::BadParameters(format!("zeroth moment {} is not 1", moments[0])));
    }
    if let Some(m) = moments.iter().find(|m| !(m.norm() <= 1.2)) {
        return Err(ProfilingError::BadParameters(format!("moment {m} exceeds 1.2 in magnitude")));
    }
    Ok(())
}

/// `C(x) = Re sum_{|k|<=D} F_k e^{ikx} M_k` on `g` uniform points of `[-1, 1]`.
pub fn build_cdf(moments: &[C64], coeffs: &FourierCoefficients, g: usize) -> Result<CdfProfile> {
    check_moments(moments, coeffs)?;
    if g < 3 {
        return Err(ProfilingError::BadParameters(format!("grid size {g} too small")));
    }
    let grid = uniform_grid(g);
    let values: Vec<C64> = grid.iter().map(|&x| series(moments, coeffs, x, 0)).collect();
    Ok(CdfProfile {
        cdf: values.iter().map(|v| v.re).collect(),
        imag_residual: values.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
        grid,
        d1: Vec::new(),
        d2: Vec::new(),
        bounds_x: None,
    })
}

/// Central differences, second-order one-sided at the endpoints.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
            _ if i == n - 1 => (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h),
            _ => (v[i + 1] - v[i - 1]) / (2.0 * h),
        })
        .collect()
}

/// Three-point second differences, second-order one-sided at the endpoints.
fn second_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h),
            _ if i == n - 1 => (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h),
            _ => (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h),
        })
        .collect()
}

/// Fills `d1 = C'` and `d2 = C''` by finite differences.
pub fn differentiate(profile: &CdfProfile) -> CdfProfile {
    let h = profile.spacing();
    let d1 = derivative(&profile.cdf, h);
    let d2 = second_derivative(&profile.cdf, h);
    CdfProfile { d1, d2, ..profile.clone() }
}

/// Term-wise derivatives `Re sum ik F_k e^{ikx} M_k` and `Re sum -k^2 F_k e^{ikx} M_k`.
pub fn differentiate_analytic(
    moments: &[C64],
    coeffs: &FourierCoefficients,
    grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_moments(moments, coeffs)?;
    Ok((
        grid.iter().map(|&x| series(moments, coeffs, x, 1).re).collect(),
        grid.iter().map(|&x| series(moments, coeffs, x, 2).re).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub bounds: SpectrumBounds,
    pub x_lb: f64,
    pub x_ub: f64,
    /// Value of `xi2` that produced the interval.
    pub xi2_used: f64,
    pub relaxations: u32,
}

/// Largest contiguous run of grid points with `C' > xi1` and `|C''| < xi2`,
/// choosing the run that contains (or lies closest to) the maximum of `C'`,
/// mapped back to energies.
pub fn extract_bounds(profile: &CdfProfile, xi1: f64, xi2: f64, bounds: &SpectrumBounds) -> Result<Extraction> {
    bounds.validate()?;
    let n = profile.grid.len();
    if profile.d1.len() != n || profile.d2.len() != n {
        return Err(ProfilingError::BadParameters("derivatives are not filled".into()));
    }
    let ok: Vec<bool> = (0..n).map(|i| profile.d1[i] > xi1 && profile.d2[i].abs() < xi2).collect();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < n {
        if ok[i] {
            let start = i;
            while i + 1 < n && ok[i + 1] {
                i += 1;
            }
            if i > start {
                runs.push((start, i));
            }
        }
        i += 1;
    }
    let peak = (0..n).max_by(|&a, &b| profile.d1[a].total_cmp(&profile.d1[b])).unwrap_or(0);
    let gap = |&(s, e): &(usize, usize)| if peak < s { s - peak } else { peak.saturating_sub(e) };
    let &(s, e) = runs.iter().min_by_key(|r| gap(r)).ok_or(ProfilingError::NoQualifyingInterval { xi1, xi2 })?;
    let (x_lb, x_ub) = (profile.grid[s], profile.grid[e]);
    let new = SpectrumBounds::new(from_x(bounds, x_lb), from_x(bounds, x_ub))?;
    Ok(Extraction { bounds: new, x_lb, x_ub, xi2_used: xi2, relaxations: 0 })
}

/// [`extract_bounds`], doubling `xi2` up to `max_relaxations` times when no
/// interval qualifies.
pub fn extract_bounds_relaxed(
    profile: &CdfProfile,
    xi1: f64,
    xi2: f64,
    bounds: &SpectrumBounds,
    max_relaxations: u32,
) -> Result<Extraction> {
    let mut x2 = xi2;
    for r in 0..=max_relaxations {
        match extract_bounds(profile, xi1, x2, bounds) {
            Ok(mut ex) => {
                ex.relaxations = r;
                return Ok(ex);
            }
            Err(ProfilingError::NoQualifyingInterval { .. }) if r < max_relaxations => {
                log::warn!("no qualifying profile interval for xi2 = {x2}; retrying with {}", 2.0 * x2);
                x2 *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("the last relaxation returns")
}
