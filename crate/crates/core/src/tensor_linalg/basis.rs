//! Orthonormal Hermitian operator bases (generalized Pauli / Gell-Mann).

use num_complex::Complex;

use super::matrix::{Complex64, ComplexMatrix};

/// An orthonormal Hermitian basis of the operator space on C^d.
///
/// `elements[0]` is proportional to the identity (I/sqrt(d)), so that
/// tr(g_j g_k) = delta_jk holds for the whole family.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Expansion coefficients tr(g_j X) of a (not necessarily Hermitian) X.
    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<Complex64> {
        self.elements
            .iter()
            .map(|g| g.matmul(x).trace())
            .collect()
    }

    /// Reconstruct sum_j c_j g_j.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, g) in coeffs.iter().zip(&self.elements) {
            out.axpy(*c, g);
        }
        out
    }

    /// Kronecker-product basis on C^{dA*dB}; index (j,k) flattens to j*lenB + k.
    pub fn product(a: &OperatorBasis, b: &OperatorBasis) -> OperatorBasis {
        let mut elements = Vec::with_capacity(a.len() * b.len());
        for ga in &a.elements {
            for gb in &b.elements {
                elements.push(ga.kron(gb));
            }
        }
        OperatorBasis {
            dim: a.dim * b.dim,
            elements,
        }
    }
}

/// Normalized generalized Pauli (Gell-Mann) basis on C^d.
///
/// Ordering: identity first, then for each index pair j<k the symmetric and
/// antisymmetric off-diagonal elements, then the diagonal elements. For d=2
/// this is exactly {I, sigma_x, sigma_y, sigma_z}/sqrt(2).
pub fn gell_mann_basis(d: usize) -> OperatorBasis {
    assert!(d >= 1, "basis dimension must be positive");
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d).scale_re(1.0 / (d as f64).sqrt()));

    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = Complex::new(inv_sqrt2, 0.0);
            sym[(k, j)] = Complex::new(inv_sqrt2, 0.0);
            elements.push(sym);

            let mut asym = ComplexMatrix::zeros(d, d);
            asym[(j, k)] = Complex::new(0.0, -inv_sqrt2);
            asym[(k, j)] = Complex::new(0.0, inv_sqrt2);
            elements.push(asym);
        }
    }
    for l in 1..d {
        // diag(1,...,1,-l,0,...)/sqrt(l(l+1))
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = Complex::new(norm, 0.0);
        }
        m[(l, l)] = Complex::new(-(l as f64) * norm, 0.0);
        elements.push(m);
    }
    OperatorBasis { dim: d, elements }
}

/// The four qubit Pauli matrices (unnormalized): I, sigma_x, sigma_y, sigma_z.
pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let mut x = ComplexMatrix::zeros(2, 2);
    x[(0, 1)] = Complex::new(1.0, 0.0);
    x[(1, 0)] = Complex::new(1.0, 0.0);
    let mut y = ComplexMatrix::zeros(2, 2);
    y[(0, 1)] = Complex::new(0.0, -1.0);
    y[(1, 0)] = Complex::new(0.0, 1.0);
    let mut z = ComplexMatrix::zeros(2, 2);
    z[(0, 0)] = Complex::new(1.0, 0.0);
    z[(1, 1)] = Complex::new(-1.0, 0.0);
    [ComplexMatrix::identity(2), x, y, z]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_basis_is_scaled_paulis() {
        let basis = gell_mann_basis(2);
        let paulis = pauli_matrices();
        let s = 1.0 / 2f64.sqrt();
        for (g, p) in basis.elements.iter().zip(paulis.iter()) {
            assert!(g.max_abs_diff(&p.scale_re(s)) < 1e-15);
        }
    }

    #[test]
    fn orthonormal_and_hermitian() {
        for d in 2..=5 {
            let basis = gell_mann_basis(d);
            assert_eq!(basis.len(), d * d);
            for (j, gj) in basis.elements.iter().enumerate() {
                assert!(gj.is_hermitian(1e-12));
                for (k, gk) in basis.elements.iter().enumerate() {
                    let ip = gj.matmul(gk).trace();
                    let expect = if j == k { 1.0 } else { 0.0 };
                    assert!(
                        (ip.re - expect).abs() <= 1e-12 && ip.im.abs() <= 1e-12,
                        "tr(g{j} g{k}) = {ip} at d={d}"
                    );
                }
            }
        }
    }
}
