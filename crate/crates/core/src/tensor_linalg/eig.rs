//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Self-contained solver adequate for the dimensions used in this crate
//! (up to ~100). Input is symmetrized before the sweep loop; inputs whose
//! Hermiticity deviation exceeds the tolerance are rejected.

use num_complex::Complex;

use super::matrix::{Complex64, ComplexMatrix};
use crate::error::{EaError, Result};

const MAX_SWEEPS: usize = 80;

/// Eigenvalues (ascending) and matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose column k is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.eigenvectors.rows();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }
}

/// Decompose a Hermitian matrix; eigenvalues returned ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigDecomposition> {
    if !m.is_square() {
        return Err(EaError::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let n = m.rows();
    let scale = m.max_abs().max(1.0);
    let tol = 1e-10 * scale;
    let dev = m.hermiticity_deviation();
    if dev > tol {
        return Err(EaError::NotHermitian {
            deviation: dev,
            tolerance: tol,
        });
    }

    let mut h = m.hermitize();
    let mut v = ComplexMatrix::identity(n);

    if n > 1 {
        let stop = f64::EPSILON * scale * (n as f64);
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(h[(p, q)].norm());
                }
            }
            if off <= stop {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut h, &mut v, p, q);
                }
            }
            if sweep == MAX_SWEEPS - 1 {
                return Err(EaError::EigNonConvergence {
                    sweeps: MAX_SWEEPS,
                    off_diagonal: off,
                });
            }
        }
        debug_assert!(converged || n <= 1);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Min eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min_eigenvalue())
}

/// Zero out h[p][q] with a two-sided complex Jacobi rotation; accumulate in v.
fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = h[(p, q)];
    let az = z.norm();
    if az == 0.0 {
        return;
    }
    let a = h[(p, p)].re;
    let b = h[(q, q)].re;
    let phase = z / az; // e^{i phi}

    // t solves t^2 + 2 tau t - 1 = 0 for this update convention; smaller root.
    let tau = (a - b) / (2.0 * az);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = h.rows();
    // Column update: col_p' = c col_p + s e^{-i phi} col_q; col_q' = -s e^{i phi} col_p + c col_q.
    let sp = Complex::new(s, 0.0) * phase.conj();
    let sq = Complex::new(s, 0.0) * phase;
    for i in 0..n {
        let hip = h[(i, p)];
        let hiq = h[(i, q)];
        h[(i, p)] = hip * c + hiq * sp;
        h[(i, q)] = hiq * c - hip * sq;
    }
    // Row update (conjugated coefficients).
    for j in 0..n {
        let hpj = h[(p, j)];
        let hqj = h[(q, j)];
        h[(p, j)] = hpj * c + hqj * sq;
        h[(q, j)] = hqj * c - hpj * sp;
    }
    // Clean up rounding on the eliminated pair and the diagonal.
    h[(p, q)] = Complex::new(0.0, 0.0);
    h[(q, p)] = Complex::new(0.0, 0.0);
    h[(p, p)] = Complex::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex::new(h[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * sp;
        v[(i, q)] = viq * c - vip * sq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(dec: &EigDecomposition) -> ComplexMatrix {
        let n = dec.eigenvalues.len();
        let v = &dec.eigenvectors;
        let mut lam = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            lam[(i, i)] = Complex64::new(dec.eigenvalues[i], 0.0);
        }
        v.matmul(&lam).matmul(&v.dagger())
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let m = ComplexMatrix::from_diag(&[3.0, 1.0, 2.0]);
        let dec = hermitian_eig(&m).unwrap();
        assert_eq!(dec.eigenvalues.len(), 3);
        assert!((dec.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((dec.eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!((dec.eigenvalues[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(1, 0)] = Complex64::new(1.0, 0.0);
        let dec = hermitian_eig(&m).unwrap();
        assert!((dec.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((dec.eigenvalues[1] - 1.0).abs() < 1e-12);
        let r = reconstruct(&dec);
        assert!(r.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        // Deterministic pseudo-random fill, no RNG dependency here.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [2usize, 3, 5, 8, 13] {
            let raw = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
            let m = raw.hermitize();
            let dec = hermitian_eig(&m).unwrap();
            let r = reconstruct(&dec);
            assert!(
                r.max_abs_diff(&m) <= 1e-10 * m.max_abs().max(1.0),
                "reconstruction residual too large at n={n}"
            );
            let vtv = dec.eigenvectors.dagger().matmul(&dec.eigenvectors);
            assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            for w in dec.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eig(&m),
            Err(EaError::NotHermitian { .. })
        ));
    }
}
