use serde::{Deserialize, Serialize};

use crate::{lp, FilterError, Result};

/// Points of the optimization grid over `[0, 1]`.
const LP_GRID: usize = 1001;
/// Points of the grid used to rescale the optimum below 1 in magnitude.
const NORM_GRID: usize = 20001;
const NORM_TARGET: f64 = 0.999;
const MAX_EPS: f64 = 0.2;

/// Even polynomial `F(a) = sum_k c_k T_{2k}(a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolynomial {
    /// Even degree `eta`.
    pub degree: usize,
    /// Step position `mu`; zero for polynomials not built by [`approximate_step`].
    pub cutoff: f64,
    /// `c_k` multiplies `T_{2k}`; length `eta / 2 + 1`.
    pub cheb_coeffs: Vec<f64>,
    /// Transition half-width `w` in `a`.
    pub band_halfwidth: f64,
    /// Achieved residual outside the transition band.
    pub eps_out: f64,
}

impl StepPolynomial {
    /// Wraps explicit even Chebyshev coefficients.
    pub fn from_chebyshev(cheb_coeffs: Vec<f64>) -> Self {
        let degree = 2 * cheb_coeffs.len().saturating_sub(1);
        Self { degree, cutoff: 0.0, cheb_coeffs, band_halfwidth: 0.0, eps_out: 0.0 }
    }

    /// Evaluates without a domain check; `T_{2k}(a) = T_k(2a^2 - 1)`.
    pub fn value(&self, a: f64) -> f64 {
        clenshaw(&self.cheb_coeffs, 2.0 * a * a - 1.0)
    }

    /// Largest `|F|` on a uniform grid of `n` points over `[0, 1]`.
    pub fn max_abs_on_grid(&self, n: usize) -> f64 {
        (0..n).map(|i| self.value(i as f64 / (n - 1) as f64).abs()).fold(0.0, f64::max)
    }
}

fn clenshaw(c: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * y * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + y * b1 - b2
}

/// `F(a)` for `|a| <= 1`.
pub fn evaluate(poly: &StepPolynomial, a: f64) -> Result<f64> {
    if !(a.abs() <= 1.0 + 1e-12) {
        return Err(FilterError::OutOfDomain(a));
    }
    Ok(poly.value(a.clamp(-1.0, 1.0)))
}

/// Minimax-style even step approximation with cutoff `mu` and transition
/// half-width `w`, solved as a linear program on a Chebyshev grid.
pub fn approximate_step(eta: usize, mu: f64, w: f64) -> Result<StepPolynomial> {
    if eta % 2 != 0 || !(4..=60).contains(&eta) {
        return Err(FilterError::BadDegree(eta));
    }
    if !(w > 0.0 && mu - w > 0.0 && mu + w < 1.0) {
        return Err(FilterError::BadBand { mu, w });
    }
    let k = eta / 2 + 1;
    let mut grid: Vec<f64> =
        (0..LP_GRID).map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / (2.0 * LP_GRID as f64)).cos()).collect();
    grid.sort_by(f64::total_cmp);
    let basis = |a: f64| -> Vec<f64> { (0..k).map(|j| (2.0 * j as f64 * a.acos()).cos()).collect() };
    let row = |t: &[f64], sign: f64, eps: f64| -> Vec<f64> {
        let mut r: Vec<f64> = t.iter().map(|v| sign * v).collect();
        r.push(eps);
        r
    };

    let (lo, hi) = (mu - w, mu + w);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut band = Vec::new();
    for &a in &grid {
        let t = basis(a);
        rows.push(row(&t, 1.0, 0.0));
        rhs.push(1.0);
        rows.push(row(&t, -1.0, 0.0));
        rhs.push(1.0);
        if a <= lo {
            rows.push(row(&t, 1.0, -1.0));
            rhs.push(0.0);
            rows.push(row(&t, -1.0, -1.0));
            rhs.push(0.0);
        } else if a >= hi {
            rows.push(row(&t, -1.0, -1.0));
            rhs.push(-1.0);
        } else {
            band.push(t);
        }
    }
    for pair in band.windows(2) {
        let d: Vec<f64> = pair[0].iter().zip(&pair[1]).map(|(x, y)| x - y).collect();
        rows.push(row(&d, 1.0, 0.0));
        rhs.push(0.0);
    }
    let mut cost = vec![0.0; k + 1];
    cost[k] = 1.0;
    let sol = lp::minimize(&cost, &rows, &rhs)?;

    let mut poly =
        StepPolynomial { degree: eta, cutoff: mu, cheb_coeffs: sol.x[..k].to_vec(), band_halfwidth: w, eps_out: 0.0 };
    let peak = poly.max_abs_on_grid(NORM_GRID);
    let scale = (NORM_TARGET / peak).min(1.0);
    poly.cheb_coeffs.iter_mut().for_each(|c| *c *= scale);
    let fine: Vec<f64> = (0..NORM_GRID).map(|i| i as f64 / (NORM_GRID - 1) as f64).collect();
    poly.eps_out = grid
        .iter()
        .chain(&fine)
        .map(|&a| {
            let f = poly.value(a);
            if a <= lo {
                f.abs()
            } else if a >= hi {
                1.0 - f
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    if poly.eps_out > MAX_EPS {
        return Err(FilterError::InfeasibleBand { eps: poly.eps_out });
    }
    Ok(poly)
}
