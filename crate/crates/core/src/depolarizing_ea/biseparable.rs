//! Biseparable decomposition of the Choi matrix of two-qubit local
//! depolarizing noise.
//!
//! The Choi matrix on legs (A, B, A', B') is written as a convex sum of
//! density operators separable across A|BA'B' and B|AA'B', built from a
//! qubit vector family (tetrahedral SIC, k=4, or the six mutually unbiased
//! basis states, k=6):
//!
//!   Ω = (1/k) Σ_k [ μ P_k^A ⊗ ρ_k^{BA'B'} + (1-μ) P_k^B ⊗ ρ~_k^{AA'B'} ],
//!   ρ_k = (a P*_k + b P*_{k,⊥})^{A'} ⊗ Ψ+^{BB'} + c I,
//!
//! with μ = (1-q1) q2 / (q1 + q2 - 2 q1 q2), a = (q1 + q2 + 2 q1 q2)/2,
//! b = (q1 + q2 - 4 q1 q2)/2, c = (1-q1)(1-q2)/8. Both families are
//! quantum 2-designs, so the same constants work for either. Components are
//! PSD iff c >= 0, a+c >= 0 and b+c >= 0, which reduces to the region
//! 1 + 3(q1 + q2) - 15 q1 q2 >= 0.

use serde::{Deserialize, Serialize};

use crate::channel_core::{depolarizing_product, Channel};
use crate::error::{EaError, Result};
use crate::tensor_linalg::{
    hermitian_eig, mes_projector, tensor_on_legs, Complex64, ComplexMatrix, DimPair,
};

/// Qubit vector family underlying the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorFamily {
    /// Tetrahedral symmetric informationally complete set, k_max = 4.
    Sic,
    /// Eigenbases of the three Pauli operators, k_max = 6.
    Mub,
}

impl VectorFamily {
    pub fn k_max(&self) -> usize {
        match self {
            VectorFamily::Sic => 4,
            VectorFamily::Mub => 6,
        }
    }

    /// The unit vectors of the family.
    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        match self {
            VectorFamily::Sic => sic_vectors(),
            VectorFamily::Mub => mub_vectors(),
        }
    }
}

fn bloch_vector(n: [f64; 3]) -> Vec<Complex64> {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Tetrahedral SIC fiducial set: |<psi_j|psi_k>|^2 = 1/3 for j != k.
fn sic_vectors() -> Vec<Vec<Complex64>> {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    [
        [0.0, 0.0, 1.0],
        [2.0 * s2 / 3.0, 0.0, -1.0 / 3.0],
        [-s2 / 3.0, s6 / 3.0, -1.0 / 3.0],
        [-s2 / 3.0, -s6 / 3.0, -1.0 / 3.0],
    ]
    .into_iter()
    .map(bloch_vector)
    .collect()
}

/// The six Pauli eigenstates: |<psi|phi>|^2 = 1/2 across different bases.
fn mub_vectors() -> Vec<Vec<Complex64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        vec![Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
    ]
}

/// Check the defining overlap conditions of a family before use.
pub fn verify_family(family: VectorFamily) -> Result<()> {
    let vs = family.vectors();
    for (j, u) in vs.iter().enumerate() {
        let n: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-12 {
            return Err(EaError::Infeasible {
                constraint: "family normalization",
                detail: format!("vector {j} has norm^2 {n}"),
            });
        }
        for (k, v) in vs.iter().enumerate().skip(j + 1) {
            let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let overlap = ip.norm_sqr();
            let ok = match family {
                VectorFamily::Sic => (overlap - 1.0 / 3.0).abs() <= 1e-12,
                VectorFamily::Mub => {
                    // Same-basis pairs are orthogonal, cross-basis overlap 1/2.
                    overlap <= 1e-12 || (overlap - 0.5).abs() <= 1e-12
                }
            };
            if !ok {
                return Err(EaError::Infeasible {
                    constraint: "family overlaps",
                    detail: format!("|<psi_{j}|psi_{k}>|^2 = {overlap}"),
                });
            }
        }
    }
    Ok(())
}

/// A constructed biseparable decomposition together with its constants.
#[derive(Debug, Clone)]
pub struct BiseparableDecomposition {
    pub family: VectorFamily,
    pub q1: f64,
    pub q2: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub target: Channel,
    /// The assembled Choi matrix on legs (A, B, A', B').
    pub reconstruction: ComplexMatrix,
    /// Smallest eigenvalue over all component operators ρ_k, ρ~_k.
    pub component_min_eigenvalue: f64,
}

impl BiseparableDecomposition {
    pub fn reconstruction_residual(&self) -> f64 {
        self.reconstruction.max_abs_diff(self.target.choi())
    }
}

/// Region inequality 1 + 3(q1+q2) - 15 q1 q2 >= 0 (equivalent to b+c >= 0).
pub fn biseparable_region(q1: f64, q2: f64) -> f64 {
    1.0 + 3.0 * (q1 + q2) - 15.0 * q1 * q2
}

fn perp(v: &[Complex64]) -> Vec<Complex64> {
    vec![-v[1].conj(), v[0].conj()]
}

/// Build and check the decomposition for Φ_{q1} ⊗ Φ_{q2} on two qubits.
pub fn biseparable_decomposition(
    q1: f64,
    q2: f64,
    family: VectorFamily,
) -> Result<BiseparableDecomposition> {
    verify_family(family)?;
    let c = (1.0 - q1) * (1.0 - q2) / 8.0;
    let a = 0.5 * (q1 + q2 + 2.0 * q1 * q2);
    let b = 0.5 * (q1 + q2 - 4.0 * q1 * q2);
    for (name, v) in [("c >= 0", c), ("a + c >= 0", a + c), ("b + c >= 0", b + c)] {
        if v < -1e-12 {
            return Err(EaError::Infeasible {
                constraint: name,
                detail: format!("value {v:.6}"),
            });
        }
    }
    let den = q1 + q2 - 2.0 * q1 * q2;
    let mu = if den.abs() < 1e-14 {
        0.5 // q1 = q2 = 0: any weight reproduces Ω = I/16
    } else {
        (1.0 - q1) * q2 / den
    };

    let target = depolarizing_product(DimPair::new(2, 2), q1, q2)?;
    let vectors = family.vectors();
    let k_max = vectors.len() as f64;
    let psi_plus = mes_projector(2);
    let dims = [2usize, 2, 2, 2]; // legs A, B, A', B'

    let mut omega = ComplexMatrix::zeros(16, 16);
    let mut component_min = f64::INFINITY;
    for v in &vectors {
        let proj = ComplexMatrix::outer(v, v);
        let conj_v: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let perp_conj = perp(v).iter().map(|z| z.conj()).collect::<Vec<_>>();
        let x = ComplexMatrix::outer(&conj_v, &conj_v)
            .scale_re(a)
            .add(&ComplexMatrix::outer(&perp_conj, &perp_conj).scale_re(b));

        // rho_k on legs (B, A', B'): X on A', Psi+ on BB', plus c * I.
        let rho = tensor_on_legs(&[2, 2, 2], &[(&[1], &x), (&[0, 2], &psi_plus)])?
            .add(&ComplexMatrix::identity(8).scale_re(c));
        // rho~_k on legs (A, A', B'): X on B', Psi+ on AA', plus c * I.
        let rho_tilde = tensor_on_legs(&[2, 2, 2], &[(&[2], &x), (&[0, 1], &psi_plus)])?
            .add(&ComplexMatrix::identity(8).scale_re(c));

        component_min = component_min
            .min(hermitian_eig(&rho.hermitize())?.min_eigenvalue())
            .min(hermitian_eig(&rho_tilde.hermitize())?.min_eigenvalue());

        // Term A: P^A(leg 0) ⊗ rho_k(legs B, A', B').
        let term_a = tensor_on_legs(
            &dims,
            &[(&[0], &proj), (&[1, 2, 3], &rho)],
        )?;
        // Term B: P^B(leg 1) ⊗ rho~_k(legs A, A', B').
        let term_b = tensor_on_legs(
            &dims,
            &[(&[1], &proj), (&[0, 2, 3], &rho_tilde)],
        )?;
        omega.axpy(Complex64::new(mu / k_max, 0.0), &term_a);
        omega.axpy(Complex64::new((1.0 - mu) / k_max, 0.0), &term_b);
    }

    Ok(BiseparableDecomposition {
        family,
        q1,
        q2,
        mu,
        a,
        b,
        c,
        target,
        reconstruction: omega,
        component_min_eigenvalue: component_min,
    })
}
