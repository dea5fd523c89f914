use affqetu_hamiltonian::DEGENERACY_TOL;
use affqetu_linalg::{SpectralDecomposition, C64};
use serde::{Deserialize, Serialize};

use crate::{AffError, Result, StageReport};

/// Overlap magnitude below which a subspace counts as emptied.
const UNDERFLOW: f64 = 1e-14;

/// Relative amplification, with the unbounded case kept explicit so that
/// serialized reports never contain a float infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Amplification {
    Finite(f64),
    /// The first excited subspace was emptied.
    Infinite,
    /// The initial state had no ground or first excited weight.
    Undefined,
}

impl Amplification {
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(a) => *a,
            Self::Infinite => f64::INFINITY,
            Self::Undefined => f64::NAN,
        }
    }
}

fn subspace_weight(coeffs: &[C64], group: std::ops::Range<usize>) -> f64 {
    coeffs[group].iter().map(|c| c.norm_sqr()).sum()
}

/// `A = sqrt[(w_f0 / w_i0) / (w_f1 / w_i1)]`, with `w_s` the weight of a state
/// in the ground (0) or first excited (1) eigenspace. Returns `+inf` when the
/// final first-excited overlap falls below `1e-14`.
pub fn relative_amplification(initial: &[C64], final_state: &[C64], decomp: &SpectralDecomposition) -> Result<f64> {
    let groups = decomp.degenerate_groups(DEGENERACY_TOL);
    if groups.len() < 2 {
        return Err(AffError::BadParameters("spectrum has a single eigenspace".into()));
    }
    let ci = decomp.coefficients(initial)?;
    let cf = decomp.coefficients(final_state)?;
    let (i0, i1) = (subspace_weight(&ci, groups[0].clone()), subspace_weight(&ci, groups[1].clone()));
    if i0.sqrt() < UNDERFLOW || i1.sqrt() < UNDERFLOW {
        return Err(AffError::ZeroInitialOverlap);
    }
    let (f0, f1) = (subspace_weight(&cf, groups[0].clone()), subspace_weight(&cf, groups[1].clone()));
    if f1.sqrt() < UNDERFLOW {
        return Ok(f64::INFINITY);
    }
    Ok(((f0 / i0) / (f1 / i1)).sqrt())
}

/// `(T_max, T_total)`: the longest filtering circuit, and the sum of all
/// filtering and profiling circuit times.
pub fn time_metrics(reports: &[StageReport]) -> (f64, f64) {
    let t_max = reports.iter().map(|r| r.t).fold(0.0, f64::max);
    let t_total = reports.iter().map(|r| r.t + r.t_profile).sum();
    (t_max, t_total)
}
