//! Dense complex linear algebra with bipartite tensor structure.

mod basis;
mod eig;
mod matrix;
mod random;

pub use basis::{gell_mann_basis, pauli_matrices, OperatorBasis};
pub use eig::{hermitian_eig, min_eigenvalue, EigDecomposition};
pub use matrix::{
    vec_inner, vec_kron, vec_norm, vec_normalize, Complex64, ComplexMatrix,
};
pub use random::{
    derived_rng, random_density, random_hermitian, random_unit_vector, random_unitary, seeded_rng,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Subsystem dimensions (dA, dB) of a bipartite system; A is the slow
/// (left) tensor factor everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimPair {
    pub a: usize,
    pub b: usize,
}

impl DimPair {
    pub fn new(a: usize, b: usize) -> Self {
        assert!(a >= 2 && b >= 2, "subsystem dimensions must be >= 2");
        Self { a, b }
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }
}

/// Selector for one factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

fn check_dim(m: &ComplexMatrix, dims: DimPair) -> Result<()> {
    m.expect_square(dims.total())
}

/// Trace out one factor, keeping the other.
pub fn partial_trace(m: &ComplexMatrix, dims: DimPair, keep: Subsystem) -> Result<ComplexMatrix> {
    check_dim(m, dims)?;
    let (da, db) = (dims.a, dims.b);
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    };
    Ok(out)
}

/// Transpose one factor of a bipartite operator.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: DimPair,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    check_dim(m, dims)?;
    let (da, db) = (dims.a, dims.b);
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for i1 in 0..da {
        for i2 in 0..db {
            for j1 in 0..da {
                for j2 in 0..db {
                    let (r, c) = match which {
                        Subsystem::A => (j1 * db + i2, i1 * db + j2),
                        Subsystem::B => (i1 * db + j2, j1 * db + i2),
                    };
                    out[(r, c)] = m[(i1 * db + i2, j1 * db + j2)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product with A on the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

// ---------------------------------------------------------------------------
// Multi-leg helpers. A "leg" is one tensor factor of a composite space; an
// operator on dims [d0, d1, ...] indexes rows and columns in mixed radix with
// leg 0 slowest.
// ---------------------------------------------------------------------------

fn decode(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for (slot, d) in idx.iter_mut().zip(dims).rev() {
        *slot = x % d;
        x /= d;
    }
    idx
}

fn encode(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i)
}

/// Transpose the listed legs of a multipartite operator.
pub fn partial_transpose_legs(
    m: &ComplexMatrix,
    dims: &[usize],
    legs: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    m.expect_square(total)?;
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let ri = decode(r, dims);
        for c in 0..total {
            let mut ci = decode(c, dims);
            let mut rs = ri.clone();
            for &l in legs {
                std::mem::swap(&mut rs[l], &mut ci[l]);
            }
            out[(encode(&rs, dims), encode(&ci, dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Trace out all legs except `keep` (result ordered as in `keep`).
pub fn partial_trace_legs(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    m.expect_square(total)?;
    let keep_dims: Vec<usize> = keep.iter().map(|&l| dims[l]).collect();
    let kept: usize = keep_dims.iter().product();
    let traced: Vec<usize> = (0..dims.len()).filter(|l| !keep.contains(l)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&l| dims[l]).collect();
    let traced_total: usize = traced_dims.iter().product::<usize>().max(1);

    let mut out = ComplexMatrix::zeros(kept, kept);
    for r in 0..kept {
        let rk = decode(r, &keep_dims);
        for c in 0..kept {
            let ck = decode(c, &keep_dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_total {
                let ti = decode(t, &traced_dims);
                let mut ri = vec![0; dims.len()];
                let mut ci = vec![0; dims.len()];
                for (pos, &l) in keep.iter().enumerate() {
                    ri[l] = rk[pos];
                    ci[l] = ck[pos];
                }
                for (pos, &l) in traced.iter().enumerate() {
                    ri[l] = ti[pos];
                    ci[l] = ti[pos];
                }
                acc += m[(encode(&ri, dims), encode(&ci, dims))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Reorder tensor legs: output leg `i` is input leg `perm[i]`.
pub fn permute_legs(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    m.expect_square(total)?;
    let new_dims: Vec<usize> = perm.iter().map(|&l| dims[l]).collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let ri = decode(r, dims);
        for c in 0..total {
            let ci = decode(c, dims);
            let rn: Vec<usize> = perm.iter().map(|&l| ri[l]).collect();
            let cn: Vec<usize> = perm.iter().map(|&l| ci[l]).collect();
            out[(encode(&rn, &new_dims), encode(&cn, &new_dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Build an operator on `dims` from sub-operators placed on disjoint leg
/// groups (identity on untouched legs). Each placement lists its legs in the
/// sub-operator's own index order.
pub fn tensor_on_legs(
    dims: &[usize],
    placements: &[(&[usize], &ComplexMatrix)],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    let mut used = vec![false; dims.len()];
    for (legs, op) in placements {
        let sub: usize = legs.iter().map(|&l| dims[l]).product();
        op.expect_square(sub)?;
        for &l in *legs {
            assert!(!used[l], "leg {l} placed twice");
            used[l] = true;
        }
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|&l| !used[l]).collect();

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let ri = decode(r, dims);
        'col: for c in 0..total {
            let ci = decode(c, dims);
            for &l in &rest {
                if ri[l] != ci[l] {
                    continue 'col;
                }
            }
            let mut val = Complex64::new(1.0, 0.0);
            for (legs, op) in placements {
                let sub_dims: Vec<usize> = legs.iter().map(|&l| dims[l]).collect();
                let rsub: Vec<usize> = legs.iter().map(|&l| ri[l]).collect();
                let csub: Vec<usize> = legs.iter().map(|&l| ci[l]).collect();
                val *= (*op)[(encode(&rsub, &sub_dims), encode(&csub, &sub_dims))];
                if val.norm_sqr() == 0.0 {
                    continue 'col;
                }
            }
            out[(r, c)] = val;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Common states.
// ---------------------------------------------------------------------------

/// Maximally entangled |Psi+> = d^{-1/2} sum_i |ii> on C^d x C^d.
pub fn mes_vector(d: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = Complex64::new(amp, 0.0);
    }
    v
}

/// Projector onto |Psi+>.
pub fn mes_projector(d: usize) -> ComplexMatrix {
    let v = mes_vector(d);
    ComplexMatrix::outer(&v, &v)
}

/// Rank-2 maximally entangled (|0,0> + |m,m>)/sqrt(2) with m = min(dA,dB)-1;
/// for equal dimensions this is the state (|11>+|dd>)/sqrt(2) in 1-based
/// labels, and it coincides with |Psi+> at dA = dB = 2.
pub fn rank2_mes_vector(dims: DimPair) -> Vec<Complex64> {
    let m = dims.a.min(dims.b) - 1;
    let mut v = vec![Complex64::new(0.0, 0.0); dims.total()];
    let amp = 1.0 / 2f64.sqrt();
    v[0] = Complex64::new(amp, 0.0);
    v[m * dims.b + m] = Complex64::new(amp, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(kron(&i2, &i2).max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);

        let p0 = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_diag(&[0.0, 1.0]);
        assert!(kron(&p0, &p1).max_abs_diff(&ComplexMatrix::from_diag(&[0.0, 1.0, 0.0, 0.0])) == 0.0);
    }

    #[test]
    fn sigma_x_pair_fixes_mes() {
        // (sigma_x tensor sigma_x) |Psi+> = +|Psi+> for d=2.
        let [_, x, _, _] = pauli_matrices();
        let xx = kron(&x, &x);
        let psi = mes_vector(2);
        let out = xx.matvec(&psi);
        for (a, b) in out.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_associativity() {
        let mut rng = seeded_rng(11);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let c = random_hermitian(2, &mut rng);
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
    }

    #[test]
    fn partial_trace_mes_marginal() {
        for d in 2..=4 {
            let rho = mes_projector(d);
            let marg = partial_trace(&rho, DimPair::new(d, d), Subsystem::A).unwrap();
            let target = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
            assert!(marg.max_abs_diff(&target) <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_product_factorization() {
        let mut rng = seeded_rng(5);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(2, &mut rng);
        let prod = kron(&rho, &sigma);
        let dims = DimPair::new(3, 2);
        let a = partial_trace(&prod, dims, Subsystem::A).unwrap();
        assert!(a.max_abs_diff(&rho) <= 1e-12); // tr(sigma) = 1
        let b = partial_trace(&prod, dims, Subsystem::B).unwrap();
        assert!(b.max_abs_diff(&sigma) <= 1e-12);
        // Trace preserved.
        assert!((a.trace() - prod.trace()).norm() <= 1e-12);
    }

    #[test]
    fn partial_transpose_involutive_and_product() {
        let mut rng = seeded_rng(6);
        let dims = DimPair::new(2, 3);
        let m = random_hermitian(6, &mut rng);
        let pt = partial_transpose(&m, dims, Subsystem::B).unwrap();
        let back = partial_transpose(&pt, dims, Subsystem::B).unwrap();
        assert!(back.max_abs_diff(&m) == 0.0);
        assert!((pt.trace() - m.trace()).norm() <= 1e-12);
        assert!(pt.is_hermitian(1e-12));

        let rho = random_density(2, &mut rng);
        let sigma = random_density(3, &mut rng);
        let prod = kron(&rho, &sigma);
        let ptb = partial_transpose(&prod, dims, Subsystem::B).unwrap();
        assert!(ptb.max_abs_diff(&kron(&rho, &sigma.transpose())) <= 1e-14);

        let id = ComplexMatrix::identity(6);
        assert!(partial_transpose(&id, dims, Subsystem::B).unwrap().max_abs_diff(&id) == 0.0);
    }

    #[test]
    fn mes_partial_transpose_min_eigenvalue() {
        for d in 2..=3 {
            let pt = partial_transpose(&mes_projector(d), DimPair::new(d, d), Subsystem::B).unwrap();
            let dec = hermitian_eig(&pt).unwrap();
            assert!((dec.min_eigenvalue() + 1.0 / d as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn basis_completeness_on_random_hermitian() {
        let mut rng = seeded_rng(7);
        for d in [2usize, 3, 4] {
            let basis = gell_mann_basis(d);
            for _ in 0..((100 / 3) + 1) {
                let x = random_hermitian(d, &mut rng);
                let coeffs = basis.coefficients(&x);
                let back = basis.reconstruct(&coeffs);
                assert!(back.max_abs_diff(&x) <= 1e-10);
            }
        }
    }

    #[test]
    fn legs_utilities_match_two_factor_ops() {
        let mut rng = seeded_rng(8);
        let dims = DimPair::new(2, 3);
        let m = random_hermitian(6, &mut rng);
        let via_pair = partial_transpose(&m, dims, Subsystem::B).unwrap();
        let via_legs = partial_transpose_legs(&m, &[2, 3], &[1]).unwrap();
        assert!(via_pair.max_abs_diff(&via_legs) == 0.0);

        let tr_pair = partial_trace(&m, dims, Subsystem::A).unwrap();
        let tr_legs = partial_trace_legs(&m, &[2, 3], &[0]).unwrap();
        assert!(tr_pair.max_abs_diff(&tr_legs) == 0.0);
    }

    #[test]
    fn tensor_on_legs_matches_kron() {
        let mut rng = seeded_rng(9);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let direct = kron(&a, &b);
        let placed = tensor_on_legs(&[2, 3], &[(&[0], &a), (&[1], &b)]).unwrap();
        assert!(direct.max_abs_diff(&placed) <= 1e-15);

        // Non-adjacent placement: operator on legs (0,2) of [2,2,2].
        let m4 = random_hermitian(4, &mut rng);
        let placed = tensor_on_legs(&[2, 2, 2], &[(&[0, 2], &m4)]).unwrap();
        let permuted = permute_legs(&kron(&m4, &ComplexMatrix::identity(2)), &[2, 2, 2], &[0, 2, 1])
            .unwrap();
        assert!(placed.max_abs_diff(&permuted) <= 1e-15);
    }

    #[test]
    fn permute_legs_roundtrip() {
        let mut rng = seeded_rng(10);
        let m = random_hermitian(8, &mut rng);
        let p = permute_legs(&m, &[2, 2, 2], &[1, 2, 0]).unwrap();
        let back = permute_legs(&p, &[2, 2, 2], &[2, 0, 1]).unwrap();
        assert!(back.max_abs_diff(&m) == 0.0);
    }
}
