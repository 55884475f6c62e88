//! Dense complex matrices and vectors.

use num_complex::Complex;

use crate::error::{EaError, Result};

pub type Complex64 = Complex<f64>;

/// Dense row-major complex matrix.
///
/// Most operators in this crate are square, but Kraus operators of channels
/// with unequal input/output dimensions are rectangular, so the shape is kept
/// general.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(nr, nc);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged rows");
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
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

    /// Side length of a square matrix. Panics on rectangular input.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "matrix is {}x{}, not square", self.rows, self.cols);
        self.rows
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn expect_square(&self, expected: usize) -> Result<()> {
        if !self.is_square() || self.rows != expected {
            return Err(EaError::DimensionMismatch {
                expected,
                got: self.rows,
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// In-place `self += factor * other`.
    pub fn axpy(&mut self, factor: Complex64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product tr(self^dag other).
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Entrywise max-abs norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Hermitian part (M + M^dag)/2.
    pub fn hermitize(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }

    /// Kronecker product, subsystem `self` on the slow (left) index.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// Outer product |u><v| of two vectors.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// <u| M |u> for a square matrix.
    pub fn expectation(&self, u: &[Complex64]) -> Complex64 {
        let mv = self.matvec(u);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Flatten row-major: entry (r,c) at index r*cols + c.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    /// Rebuild a matrix from its row-major flattening.
    pub fn unflatten(rows: usize, cols: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self {
            rows,
            cols,
            data: v.to_vec(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// L2 norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalize a vector in place; no-op on (near-)zero vectors.
pub fn vec_normalize(v: &mut [Complex64]) {
    let n = vec_norm(v);
    if n > 1e-300 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// <u|v>.
pub fn vec_inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// |u> tensor |v>, u on the slow index.
pub fn vec_kron(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_and_dagger() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ]);
        let prod = a.matmul(&a.dagger());
        assert!(prod.is_hermitian(1e-15));
        assert!((prod[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn outer_and_expectation() {
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let p = ComplexMatrix::outer(&v, &v);
        assert!((p.expectation(&v).re - 1.0).abs() < 1e-15);
        assert!((p.trace().re - 1.0).abs() < 1e-15);
    }
}
