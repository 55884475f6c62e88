//! Representation conversions: Kraus <-> Choi <-> transfer matrix.
//!
//! Conventions: the Choi matrix is Ω = (Φ ⊗ Id)[|Ψ+><Ψ+|] with normalized
//! |Ψ+>, so tr Ω = 1 for trace-preserving maps and the composite index is
//! (out ⊗ in) with the output legs slow. Transfer matrices live in the
//! product Gell-Mann bases fixed by each side's `Dims`.

use num_complex::Complex;

use super::Dims;
use crate::error::{EaError, Result};
use crate::tensor_linalg::{hermitian_eig, partial_trace, Complex64, ComplexMatrix, DimPair, Subsystem};

/// Eigenvalue cutoff deciding the numerical rank of a Choi matrix.
const KRAUS_RANK_CUTOFF: f64 = 1e-10;

/// Ω = (1/din) Σ_k vec(A_k) vec(A_k)^dag with row-major vectorization.
pub fn choi_from_kraus(kraus: &[ComplexMatrix], din: usize) -> ComplexMatrix {
    let n = kraus[0].rows() * kraus[0].cols();
    let mut choi = ComplexMatrix::zeros(n, n);
    let w = Complex::new(1.0 / din as f64, 0.0);
    for k in kraus {
        let v = k.flatten();
        for (r, vr) in v.iter().enumerate() {
            if vr.norm_sqr() == 0.0 {
                continue;
            }
            for (c, vc) in v.iter().enumerate() {
                choi[(r, c)] += w * vr * vc.conj();
            }
        }
    }
    choi
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix.
///
/// The number of operators equals the numerical rank (eigenvalues above
/// 1e-10). Fails with `NotCompletelyPositive` when the Choi matrix has an
/// eigenvalue below -1e-10.
pub fn kraus_from_choi(
    choi: &ComplexMatrix,
    din: usize,
    dout: usize,
) -> Result<Vec<ComplexMatrix>> {
    let dec = hermitian_eig(&choi.hermitize())?;
    let min = dec.min_eigenvalue();
    if min < -KRAUS_RANK_CUTOFF {
        return Err(EaError::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    let mut kraus = Vec::new();
    for (i, &lam) in dec.eigenvalues.iter().enumerate() {
        if lam <= KRAUS_RANK_CUTOFF {
            continue;
        }
        let scale = (din as f64 * lam).sqrt();
        let v = dec.eigenvector(i);
        let flat: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
        kraus.push(ComplexMatrix::unflatten(dout, din, &flat));
    }
    if kraus.is_empty() {
        // Zero map: keep a single zero Kraus operator so shapes stay valid.
        kraus.push(ComplexMatrix::zeros(dout, din));
    }
    Ok(kraus)
}

/// Φ[X] = din * tr_in[ Ω (I_out ⊗ X^T) ].
pub fn apply_via_choi(
    choi: &ComplexMatrix,
    x: &ComplexMatrix,
    din: usize,
    dout: usize,
) -> ComplexMatrix {
    let xt = x.transpose();
    // (Ω (I ⊗ X^T))[(a,i),(b,j)] = Σ_k Ω[(a,i),(b,k)] X^T[k,j]
    // partial trace over the in legs: result[a,b] = Σ_j din * Σ_k Ω[(a,j),(b,k)] X^T[k,j]
    let mut out = ComplexMatrix::zeros(dout, dout);
    for a in 0..dout {
        for b in 0..dout {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..din {
                for k in 0..din {
                    acc += choi[(a * din + j, b * din + k)] * xt[(k, j)];
                }
            }
            out[(a, b)] = acc * din as f64;
        }
    }
    out
}

/// Transfer entries E_{jk} = din * tr[Ω (γ_j^out ⊗ (γ_k^in)^T)].
pub fn transfer_from_choi(
    choi: &ComplexMatrix,
    dims_in: &Dims,
    dims_out: &Dims,
) -> ComplexMatrix {
    let bin = dims_in.operator_basis();
    let bout = dims_out.operator_basis();
    let din = dims_in.total();
    let dout = dims_out.total();
    let mut e = ComplexMatrix::zeros(bout.len(), bin.len());
    for (k, gk) in bin.elements.iter().enumerate() {
        let gkt = gk.transpose();
        for (j, gj) in bout.elements.iter().enumerate() {
            // tr[Ω (γ_j ⊗ γ_k^T)] without materializing the Kronecker product.
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..dout {
                for b in 0..dout {
                    let gab = gj[(b, a)];
                    if gab.norm_sqr() == 0.0 {
                        continue;
                    }
                    for i in 0..din {
                        for l in 0..din {
                            let g2 = gkt[(l, i)];
                            if g2.norm_sqr() == 0.0 {
                                continue;
                            }
                            acc += choi[(a * din + i, b * din + l)] * gab * g2;
                        }
                    }
                }
            }
            e[(j, k)] = acc * din as f64;
        }
    }
    e
}

/// Ω = (1/din) Σ_{jk} E_{jk} γ_j^out ⊗ (γ_k^in)^T.
pub fn choi_from_transfer(
    transfer: &ComplexMatrix,
    dims_in: &Dims,
    dims_out: &Dims,
) -> ComplexMatrix {
    let bin = dims_in.operator_basis();
    let bout = dims_out.operator_basis();
    let din = dims_in.total();
    let dout = dims_out.total();
    let n = dout * din;
    let mut choi = ComplexMatrix::zeros(n, n);
    let w = 1.0 / din as f64;
    for (j, gj) in bout.elements.iter().enumerate() {
        for (k, gk) in bin.elements.iter().enumerate() {
            let e = transfer[(j, k)];
            if e.norm_sqr() == 0.0 {
                continue;
            }
            accumulate_kron_t(&mut choi, e * w, gj, gk, din);
        }
    }
    choi
}

/// Diagonal-transfer fast path: Ω = (1/din) Σ_j e_j γ_j ⊗ γ_j^T.
pub fn choi_from_transfer_diag(diag: &[f64], dims: &Dims) -> ComplexMatrix {
    let basis = dims.operator_basis();
    let d = dims.total();
    let n = d * d;
    let mut choi = ComplexMatrix::zeros(n, n);
    let w = 1.0 / d as f64;
    for (g, &e) in basis.elements.iter().zip(diag) {
        if e == 0.0 {
            continue;
        }
        accumulate_kron_t(&mut choi, Complex::new(e * w, 0.0), g, g, d);
    }
    choi
}

/// choi += factor * (a ⊗ b^T), skipping zero entries of the sparse bases.
fn accumulate_kron_t(
    choi: &mut ComplexMatrix,
    factor: Complex64,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    din: usize,
) {
    let da = a.rows();
    for r1 in 0..da {
        for c1 in 0..da {
            let av = a[(r1, c1)];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            let f = factor * av;
            for r2 in 0..din {
                for c2 in 0..din {
                    // b^T entry (r2, c2) = b[(c2, r2)]
                    let bv = b[(c2, r2)];
                    if bv.norm_sqr() == 0.0 {
                        continue;
                    }
                    choi[(r1 * din + r2, c1 * din + c2)] += f * bv;
                }
            }
        }
    }
}

/// tr_out of the Choi matrix, used by the trace-preservation test:
/// equals I/din exactly for TP maps.
pub fn choi_input_marginal(choi: &ComplexMatrix, din: usize, dout: usize) -> Result<ComplexMatrix> {
    partial_trace(choi, DimPair::new(dout, din), Subsystem::B)
}
