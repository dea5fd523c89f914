use std::f64::consts::PI;

use affqetu_linalg::C64;
use serde::{Deserialize, Serialize};

use crate::{bessel_i, ProfilingError, Result};

/// Coefficients `F_k`, `|k| <= D`, of the truncated Fourier series of the
/// periodic smoothed step used to reconstruct the CDF.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    pub d: usize,
    pub beta: f64,
    /// `values[k + D] = F_k`.
    pub values: Vec<C64>,
}

impl FourierCoefficients {
    pub fn get(&self, k: i64) -> C64 {
        let idx = k + self.d as i64;
        if idx < 0 || idx as usize >= self.values.len() {
            return C64::new(0.0, 0.0);
        }
        self.values[idx as usize]
    }
}

/// `F_0 = 1/2`, `F_{2j+1} = -i sqrt(beta / 2 pi) e^{-beta} (I_j + I_{j+1}) / (2j+1)`
/// and `F_D = -i sqrt(beta / 2 pi) e^{-beta} I_{(D-1)/2} / D`; `F_{-k}` is the
/// conjugate of `F_k` and even nonzero orders vanish.
pub fn fourier_coefficients(d: usize, beta: f64) -> Result<FourierCoefficients> {
    if d % 2 == 0 || !(3..=99).contains(&d) {
        return Err(ProfilingError::BadParameters(format!("D = {d} must be odd and in [3, 99]")));
    }
    if !(beta > 0.1 && beta < 50.0) {
        return Err(ProfilingError::BadParameters(format!("beta = {beta} must lie in (0.1, 50)")));
    }
    let pref = (beta / (2.0 * PI)).sqrt() * (-beta).exp();
    let mut values = vec![C64::new(0.0, 0.0); 2 * d + 1];
    values[d] = C64::new(0.5, 0.0);
    for k in (1..=d).step_by(2) {
        let j = ((k - 1) / 2) as i64;
        let mag = if k == d {
            pref * bessel_i(j, beta) / k as f64
        } else {
            pref * (bessel_i(j, beta) + bessel_i(j + 1, beta)) / k as f64
        };
        values[d + k] = C64::new(0.0, -mag);
        values[d - k] = C64::new(0.0, mag);
    }
    Ok(FourierCoefficients { d, beta, values })
}
