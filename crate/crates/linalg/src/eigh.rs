use std::ops::Range;

use crate::{inner, DenseMatrix, LinalgError, Result, C64};

/// Eigensystem of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<C64>>,
}

/// Tuning knobs of the cyclic Jacobi solver.
#[derive(Clone, Copy, Debug)]
pub struct EighOptions {
    /// Convergence threshold on the off-diagonal Frobenius norm, relative to `max(1, ||H||_F)`.
    pub off_tol: f64,
    pub max_sweeps: usize,
    /// Largest accepted `|H - H^dagger|` entry.
    pub hermitian_tol: f64,
}

impl Default for EighOptions {
    fn default() -> Self {
        Self { off_tol: 1e-12, max_sweeps: 100, hermitian_tol: 1e-10 }
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(h: &DenseMatrix) -> Result<SpectralDecomposition> {
    eigh_with(h, EighOptions::default())
}

pub fn eigh_with(h: &DenseMatrix, opts: EighOptions) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let deviation = h.hermitian_deviation().unwrap_or(f64::INFINITY);
    if deviation > opts.hermitian_tol {
        return Err(LinalgError::NonHermitian { deviation });
    }
    let n = h.rows();
    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a: Vec<C64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                C64::new(h[(i, i)].re, 0.0)
            } else {
                0.5 * (h[(i, j)] + h[(j, i)].conj())
            }
        })
        .collect();
    let mut v: Vec<C64> = DenseMatrix::identity(n).as_slice().to_vec();
    let tol = opts.off_tol * h.frobenius().max(1.0);

    let off_norm = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > tol {
        if sweeps == opts.max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if mag < 1e-3 * tol / n as f64 {
                    continue;
                }
                let e = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * ec * akq;
                    a[k * n + q] = s * akp + c * ec * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * e * aqk;
                    a[q * n + k] = s * apk + c * e * aqk;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p] = C64::new(app - t * mag, 0.0);
                a[q * n + q] = C64::new(aqq + t * mag, 0.0);
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * ec * vkq;
                    v[k * n + q] = s * vkp + c * ec * vkq;
                }
            }
        }
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|i| v[i * n + j]).collect()).collect();
    Ok(SpectralDecomposition { eigenvalues, vectors })
}

impl SpectralDecomposition {
    /// Builds a decomposition from ascending eigenvalues and orthonormal vectors.
    pub fn from_parts(eigenvalues: Vec<f64>, vectors: Vec<Vec<C64>>) -> Self {
        debug_assert_eq!(eigenvalues.len(), vectors.len());
        Self { eigenvalues, vectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[C64] {
        &self.vectors[j]
    }

    pub fn eigenvectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// Overlaps `<psi_j|state>` for every eigenvector.
    pub fn coefficients(&self, state: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(state.len())?;
        Ok(self.vectors.iter().map(|v| inner(v, state)).collect())
    }

    /// `sum_j c_j |psi_j>`.
    pub fn synthesize(&self, coeffs: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(coeffs.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    /// `f(H)|state>` for a scalar function of the eigenvalue.
    pub fn apply_function(&self, state: &[C64], f: impl Fn(f64) -> C64) -> Result<Vec<C64>> {
        let mut c = self.coefficients(state)?;
        for (cj, &l) in c.iter_mut().zip(&self.eigenvalues) {
            *cj *= f(l);
        }
        self.synthesize(&c)
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n, n);
        for (l, v) in self.eigenvalues.iter().zip(&self.vectors) {
            for i in 0..n {
                let vi = v[i] * *l;
                for j in 0..n {
                    m[(i, j)] += vi * v[j].conj();
                }
            }
        }
        m
    }

    /// Index ranges of eigenvalues that agree within `tol` of the first member.
    pub fn degenerate_groups(&self, tol: f64) -> Vec<Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for j in 1..=self.dim() {
            if j == self.dim() || self.eigenvalues[j] - self.eigenvalues[start] > tol {
                groups.push(start..j);
                start = j;
            }
        }
        groups
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}
