//! Transverse-field Ising model (TFIM) Hamiltonians and the spectrum maps used
//! by QETU filtering.
//!
//! The Hamiltonian is `H = -J sum_b Z_i Z_j - g sum_i X_i`, where the bond set
//! is the open chain `(i, i+1)` for `i < L-1`, optionally closed by `(L-1, 0)`.
//! A spectrum interval `(lb, ub)` is mapped onto `(0, pi)` by
//! `H~ = pi (H - lb) / (ub - lb)`, and eigenvalues then enter the filter
//! through `a = cos(lambda~ / 2)`.

use std::f64::consts::PI;

use affqetu_linalg::{DenseMatrix, HermitianOperator, LinalgError, SpectralDecomposition, C64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest chain length accepted by [`build_tfim`].
pub const MAX_SITES: usize = 12;

/// Tolerance used to group degenerate eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("chain length {0} exceeds the supported maximum of {MAX_SITES}")]
    TooLarge(usize),
    #[error("invalid TFIM parameters: {0}")]
    BadParameters(String),
    #[error("degenerate spectrum bounds: lb = {lb}, ub = {ub}")]
    DegenerateBounds { lb: f64, ub: f64 },
    #[error("spectrum has a single distinct eigenvalue")]
    FullyDegenerate,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, HamiltonianError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Bonds `(i, i+1)` for `i = 0..L-1`.
    #[default]
    Open,
    /// Open bonds plus the wrap-around bond `(L-1, 0)`; needs `L >= 3`.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub g: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl TfimParams {
    pub fn open(l: usize, j: f64, g: f64) -> Self {
        Self { l, j, g, boundary: Boundary::Open }
    }

    pub fn periodic(l: usize, j: f64, g: f64) -> Self {
        Self { l, j, g, boundary: Boundary::Periodic }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(HamiltonianError::BadParameters(format!("L = {} must be at least 2", self.l)));
        }
        if self.l > MAX_SITES {
            return Err(HamiltonianError::TooLarge(self.l));
        }
        if self.boundary == Boundary::Periodic && self.l < 3 {
            return Err(HamiltonianError::BadParameters("periodic chains need L >= 3".into()));
        }
        if !self.j.is_finite() || !self.g.is_finite() {
            return Err(HamiltonianError::BadParameters("J and g must be finite".into()));
        }
        Ok(())
    }

    /// ZZ bonds as qubit pairs.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<_> = (0..self.l - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((self.l - 1, 0));
        }
        b
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    /// `|J| * n_bonds + |g| * L`, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.j.abs() * self.bonds().len() as f64 + self.g.abs() * self.l as f64
    }

    /// Diagonal of the ZZ part in the computational basis.
    pub fn zz_diagonal(&self) -> Vec<f64> {
        let bonds = self.bonds();
        (0..self.dim())
            .map(|s| {
                let zz: f64 = bonds.iter().map(|&(a, b)| if ((s >> a) ^ (s >> b)) & 1 == 0 { 1.0 } else { -1.0 }).sum();
                -self.j * zz
            })
            .collect()
    }
}

/// Dense TFIM Hamiltonian.
pub fn build_tfim(params: &TfimParams) -> Result<HermitianOperator> {
    params.validate()?;
    let n = params.dim();
    let mut m = DenseMatrix::zeros(n, n);
    for (s, d) in params.zz_diagonal().into_iter().enumerate() {
        m[(s, s)] = C64::new(d, 0.0);
    }
    for s in 0..n {
        for q in 0..params.l {
            m[(s ^ (1 << q), s)] += C64::new(-params.g, 0.0);
        }
    }
    Ok(HermitianOperator::new(m)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBounds {
    pub lambda_lb: f64,
    pub lambda_ub: f64,
}

impl SpectrumBounds {
    pub fn new(lambda_lb: f64, lambda_ub: f64) -> Result<Self> {
        let b = Self { lambda_lb, lambda_ub };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_ub - self.lambda_lb > 0.0) || !self.lambda_lb.is_finite() || !self.lambda_ub.is_finite() {
            return Err(HamiltonianError::DegenerateBounds { lb: self.lambda_lb, ub: self.lambda_ub });
        }
        Ok(())
    }

    /// Spectrum length `ub - lb`.
    pub fn width(&self) -> f64 {
        self.lambda_ub - self.lambda_lb
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lambda_lb <= lambda && lambda <= self.lambda_ub
    }

    /// Symmetric bounds `±1.05 * norm_bound`, valid for any state.
    pub fn default_for(params: &TfimParams) -> Self {
        let r = 1.05 * params.norm_bound();
        Self { lambda_lb: -r, lambda_ub: r }
    }

    pub fn coefficients(&self) -> TransformCoefficients {
        let c1 = PI / (2.0 * self.width());
        TransformCoefficients { c1, c2: -c1 * self.lambda_lb }
    }

    /// `pi (lambda - lb) / (ub - lb)`.
    pub fn transform(&self, lambda: f64) -> f64 {
        PI * (lambda - self.lambda_lb) / self.width()
    }

    /// `cos(lambda~ / 2)` without clamping: the filter response is periodic
    /// in `lambda~`, so values outside the bounds keep their physical meaning.
    pub fn a_of(&self, lambda: f64) -> f64 {
        (0.5 * self.transform(lambda)).cos()
    }
}

/// `a = cos(c1 * lambda + c2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformCoefficients {
    pub c1: f64,
    pub c2: f64,
}

impl TransformCoefficients {
    pub fn a_of(&self, lambda: f64) -> f64 {
        (self.c1 * lambda + self.c2).cos()
    }
}

/// `H~ = pi (H - lb I) / (ub - lb)`.
pub fn linear_transform(h: &HermitianOperator, bounds: &SpectrumBounds) -> Result<HermitianOperator> {
    bounds.validate()?;
    Ok(h.affine(PI / bounds.width(), bounds.lambda_lb))
}

/// `cos(lambda~ / 2)` with `lambda~` clamped to `[0, pi]`; clamping is logged.
pub fn cosine_map(lambda_t: f64) -> f64 {
    cosine_map_checked(lambda_t).0
}

/// Like [`cosine_map`] and also reports whether the input was clamped.
pub fn cosine_map_checked(lambda_t: f64) -> (f64, bool) {
    let clamped = lambda_t.clamp(0.0, PI);
    let was = clamped != lambda_t;
    if was {
        log::warn!("cosine_map: lambda~ = {lambda_t} outside [0, pi], clamped to {clamped}");
    }
    ((0.5 * clamped).cos(), was)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGaps {
    /// `lambda_1 - lambda_0` between the two lowest distinct levels.
    pub delta: f64,
    /// `a_0 - a_1` in the cosine space of the given bounds.
    pub delta_a: f64,
    pub a0: f64,
    pub a1: f64,
}

pub fn spectral_gaps(decomp: &SpectralDecomposition, bounds: &SpectrumBounds) -> Result<SpectralGaps> {
    bounds.validate()?;
    let groups = decomp.degenerate_groups(DEGENERACY_TOL);
    if groups.len() < 2 {
        return Err(HamiltonianError::FullyDegenerate);
    }
    let l0 = decomp.eigenvalues()[groups[0].start];
    let l1 = decomp.eigenvalues()[groups[1].start];
    let a0 = cosine_map(bounds.transform(l0));
    let a1 = cosine_map(bounds.transform(l1));
    Ok(SpectralGaps { delta: l1 - l0, delta_a: a0 - a1, a0, a1 })
}
