use std::ops::{Index, IndexMut};

use crate::{LinalgError, Result, C64};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    ///
    /// # Panics
    /// If `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A^dagger|` over all entries; `None` for non-square input.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Some(dev)
    }

    /// `max |U^dagger U - I|`; `None` for non-square input.
    pub fn unitarity_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let p = self.adjoint().matmul(self).ok()?;
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((p[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        Some(dev)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product: `kron(A,B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (rb, cb) = (b.rows, b.cols);
    DenseMatrix::from_fn(a.rows * rb, a.cols * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Single-qubit constant matrices.
pub mod paulis {
    use super::DenseMatrix;
    use crate::C64;

    const O: C64 = C64::new(0.0, 0.0);
    const I1: C64 = C64::new(1.0, 0.0);
    const II: C64 = C64::new(0.0, 1.0);

    pub fn id() -> DenseMatrix {
        DenseMatrix::identity(2)
    }

    pub fn x() -> DenseMatrix {
        DenseMatrix::from_vec(2, 2, vec![O, I1, I1, O])
    }

    pub fn y() -> DenseMatrix {
        DenseMatrix::from_vec(2, 2, vec![O, -II, II, O])
    }

    pub fn z() -> DenseMatrix {
        DenseMatrix::from_vec(2, 2, vec![I1, O, O, -I1])
    }

    pub fn h() -> DenseMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DenseMatrix::from_real(2, 2, &[s, s, s, -s])
    }

    /// `S^dagger = diag(1, -i)`.
    pub fn s_dag() -> DenseMatrix {
        DenseMatrix::from_vec(2, 2, vec![I1, O, O, -II])
    }

    /// `e^{i phi X}`.
    pub fn exp_ix(phi: f64) -> DenseMatrix {
        let (s, c) = phi.sin_cos();
        DenseMatrix::from_vec(2, 2, vec![C64::new(c, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(c, 0.0)])
    }

    /// `e^{-i theta X}`.
    pub fn rx(theta: f64) -> DenseMatrix {
        exp_ix(-theta)
    }

    /// `e^{-i theta Z}`.
    pub fn rz(theta: f64) -> DenseMatrix {
        DenseMatrix::diagonal(&[C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)])
    }

    /// `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> DenseMatrix {
        DenseMatrix::diagonal(&[I1, C64::from_polar(1.0, phi)])
    }

    pub fn cnot() -> DenseMatrix {
        let mut m = DenseMatrix::zeros(4, 4);
        m[(0, 0)] = I1;
        m[(1, 1)] = I1;
        m[(2, 3)] = I1;
        m[(3, 2)] = I1;
        m
    }

    pub fn cz() -> DenseMatrix {
        DenseMatrix::diagonal(&[I1, I1, I1, -I1])
    }

    /// Two-qubit gate applying `u` to the second target when the first is `|1>`.
    pub fn controlled(u: &DenseMatrix) -> DenseMatrix {
        let mut m = DenseMatrix::identity(4);
        for i in 0..2 {
            for j in 0..2 {
                m[(2 + i, 2 + j)] = u[(i, j)];
            }
        }
        m
    }
}
