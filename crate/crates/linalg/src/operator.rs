use std::sync::OnceLock;

use crate::{eigh, DenseMatrix, LinalgError, Result, SpectralDecomposition};

/// Dense Hermitian matrix with a lazily computed, cached eigendecomposition.
#[derive(Debug)]
pub struct HermitianOperator {
    matrix: DenseMatrix,
    decomp: OnceLock<SpectralDecomposition>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let decomp = OnceLock::new();
        if let Some(d) = self.decomp.get() {
            let _ = decomp.set(d.clone());
        }
        Self { matrix: self.matrix.clone(), decomp }
    }
}

impl HermitianOperator {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let deviation = matrix.hermitian_deviation().unwrap_or(f64::INFINITY);
        if deviation > 1e-10 {
            return Err(LinalgError::NonHermitian { deviation });
        }
        Ok(Self { matrix, decomp: OnceLock::new() })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigendecomposition, computed on first use.
    pub fn decomposition(&self) -> Result<&SpectralDecomposition> {
        if let Some(d) = self.decomp.get() {
            return Ok(d);
        }
        let d = eigh(&self.matrix)?;
        let _ = self.decomp.set(d);
        Ok(self.decomp.get().expect("decomposition was just stored"))
    }

    /// `scale * (H - shift * I)`, reusing the cached eigenvectors when present.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let n = self.dim();
        let mut m = self.matrix.scale(crate::C64::new(scale, 0.0));
        for i in 0..n {
            m[(i, i)] -= crate::C64::new(scale * shift, 0.0);
        }
        let decomp = OnceLock::new();
        if let Some(d) = self.decomp.get() {
            let mut vals: Vec<f64> = d.eigenvalues().iter().map(|l| scale * (l - shift)).collect();
            let mut vecs = d.eigenvectors().to_vec();
            if scale < 0.0 {
                vals.reverse();
                vecs.reverse();
            }
            let _ = decomp.set(SpectralDecomposition::from_parts(vals, vecs));
        }
        Self { matrix: m, decomp }
    }
}
