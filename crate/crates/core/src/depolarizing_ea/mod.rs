//! Entanglement annihilation under depolarizing noise, as executable
//! mathematics: exact regions for 2x2 and 3x2 systems, the sufficient
//! product-noise inequality, closed-form thresholds, explicit resolutions
//! into positive maps followed by one-sided EB operations, biseparable
//! decompositions, and robustness curves for the maximally entangled state
//! and the two-level state |gamma>.

mod biseparable;
mod resolution;

pub use biseparable::{biseparable_decomposition, BiseparableDecomposition, VectorFamily};
pub use resolution::{
    global_resolution, global_resolution_3x2, local_resolution, local_resolution_3x2,
    max_certified_q_3x2, Resolution, ResolutionTerm,
};

use serde::{Deserialize, Serialize};

use crate::channel_core::{depolarizing_cp_range, depolarizing_global, depolarizing_product};
use crate::criteria::{to_json_vector, Certificate, Classification, Criterion};
use crate::error::{EaError, Result};
use crate::tensor_linalg::{
    hermitian_eig, mes_projector, partial_transpose, rank2_mes_vector, ComplexMatrix, DimPair,
    Subsystem,
};
use crate::DEFAULT_TOL;

const REGION_SLACK: f64 = 1e-12;

/// Closed-form noise thresholds for d x d systems.
///
/// `q_ea_*` bound the certified-EA region from the explicit resolutions,
/// `q_mes_*` the separability of the depolarized maximally entangled state,
/// and `q_nea_*` the survival of |gamma> entanglement (so channels above
/// them are certainly not EA).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub d: usize,
    pub q_ea_local: f64,
    pub q_ea_global: f64,
    pub q_mes_local: f64,
    pub q_mes_global: f64,
    pub q_nea_local: f64,
    pub q_nea_global: f64,
}

/// Evaluate the threshold formulas at a given per-subsystem dimension.
pub fn thresholds(d: usize) -> Result<ThresholdTable> {
    if d < 2 {
        return Err(EaError::UnsupportedDims {
            detail: format!("thresholds need d >= 2, got {d}"),
        });
    }
    let df = d as f64;
    let sqrt3 = 3f64.sqrt();
    Ok(ThresholdTable {
        d,
        q_ea_local: (df - 2.0 + df * (2.0 * df / (df + 1.0)).sqrt()) / ((df - 1.0) * (df + 2.0)),
        q_ea_global: (df + 2.0) / ((df + 1.0) * (df * df - df + 2.0)),
        q_mes_local: 1.0 / (df + 1.0).sqrt(),
        q_mes_global: 1.0 / (df + 1.0),
        q_nea_local: (1.0 + sqrt3) / (df + 1.0 + sqrt3),
        q_nea_global: 2.0 / (df * df + 2.0),
    })
}

/// Sufficient product-noise inequality for d x d local depolarizing noise:
/// (d^2 - 1) q1 q2 <= 1 + (d-2)(d+1)/(d+2) * (q1 + q2).
pub fn eq5_region(d: usize, q1: f64, q2: f64) -> bool {
    let df = d as f64;
    let lhs = (df * df - 1.0) * q1 * q2;
    let rhs = 1.0 + (df - 2.0) * (df + 1.0) / (df + 2.0) * (q1 + q2);
    lhs <= rhs + REGION_SLACK
}

/// Positive root of the symmetric (q1 = q2 = q) boundary of the sufficient
/// inequality; coincides with `q_ea_local`.
pub fn eq5_symmetric_boundary(d: usize) -> f64 {
    let df = d as f64;
    // (d^2-1) q^2 - 2 chi q - 1 = 0, chi = (d-2)(d+1)/(d+2).
    let a = df * df - 1.0;
    let chi = (df - 2.0) * (df + 1.0) / (df + 2.0);
    (chi + (chi * chi + a).sqrt()) / a
}

/// Whether the exact (PPT-derived) region formulas cover these dimensions.
pub fn exact_region_supported(dims: DimPair) -> bool {
    let (a, b) = (dims.a, dims.b);
    (a, b) == (2, 2) || (a, b) == (3, 2) || (a, b) == (2, 3)
}

fn no_with_input_certificate(
    dims: DimPair,
    q1: f64,
    q2: f64,
    global_q: Option<f64>,
    tol: f64,
) -> Result<Classification> {
    // The violating input is the rank-2 maximally entangled state (the
    // maximally entangled state itself at 2x2); the witness is the minimal
    // eigenvector of the output's partial transpose.
    let input = if dims.a == dims.b && dims.a == 2 {
        crate::tensor_linalg::mes_vector(2)
    } else {
        rank2_mes_vector(dims)
    };
    let state = ComplexMatrix::outer(&input, &input);
    let out = match global_q {
        Some(q) => depolarizing_global(dims, q)?.apply(&state)?,
        None => depolarizing_product(dims, q1, q2)?.apply(&state)?,
    };
    let pt = partial_transpose(&out, dims, Subsystem::B)?;
    let dec = hermitian_eig(&pt.hermitize())?;
    let min = dec.min_eigenvalue();
    Ok(Classification::no(
        Criterion::Ea,
        Certificate::InputState {
            pt_value: min,
            input: to_json_vector(&input),
            witness: to_json_vector(&dec.eigenvector(0)),
        },
        tol,
    ))
}

/// Exact EA region for local depolarizing noise on 2x2 or 3x2 systems.
///
/// 2x2: EA iff q1 q2 <= 1/3. 3x2 (qutrit parameter q_A, qubit q_B):
/// EA iff q_A (9 q_B - 1) <= 2. `q1` always refers to subsystem A.
pub fn exact_region_local(dims: DimPair, q1: f64, q2: f64) -> Result<Classification> {
    let tol = DEFAULT_TOL;
    validate_q(dims.a, q1)?;
    validate_q(dims.b, q2)?;
    let (name, lhs, rhs) = match (dims.a, dims.b) {
        (2, 2) => ("q1*q2 <= 1/3".to_string(), q1 * q2, 1.0 / 3.0),
        (3, 2) => ("q1*(9*q2 - 1) <= 2".to_string(), q1 * (9.0 * q2 - 1.0), 2.0),
        (2, 3) => ("q2*(9*q1 - 1) <= 2".to_string(), q2 * (9.0 * q1 - 1.0), 2.0),
        _ => {
            return Err(EaError::UnsupportedDims {
                detail: format!("exact local region needs 2x2 or 3x2, got {dims:?}"),
            })
        }
    };
    if lhs <= rhs + REGION_SLACK {
        Ok(Classification::yes(
            Criterion::Ea,
            Some(Certificate::Region { name, lhs, rhs }),
            tol,
        ))
    } else {
        no_with_input_certificate(dims, q1, q2, None, tol)
    }
}

/// Exact EA region for global depolarizing noise: q <= 1/3 at 2x2 and
/// q <= 1/4 at 3x2.
pub fn exact_region_global(dims: DimPair, q: f64) -> Result<Classification> {
    let tol = DEFAULT_TOL;
    validate_q(dims.total(), q)?;
    let (name, rhs) = match (dims.a, dims.b) {
        (2, 2) => ("q <= 1/3", 1.0 / 3.0),
        (3, 2) | (2, 3) => ("q <= 1/4", 0.25),
        _ => {
            return Err(EaError::UnsupportedDims {
                detail: format!("exact global region needs 2x2 or 3x2, got {dims:?}"),
            })
        }
    };
    if q <= rhs + REGION_SLACK {
        Ok(Classification::yes(
            Criterion::Ea,
            Some(Certificate::Region {
                name: name.into(),
                lhs: q,
                rhs,
            }),
            tol,
        ))
    } else {
        no_with_input_certificate(dims, 0.0, 0.0, Some(q), tol)
    }
}

fn validate_q(d: usize, q: f64) -> Result<()> {
    let (lo, hi) = depolarizing_cp_range(d);
    if !(lo - 1e-12..=hi + 1e-12).contains(&q) {
        return Err(EaError::OutsideCpRange { q, lo, hi });
    }
    Ok(())
}

/// Minimal partial-transpose eigenvalues of the four depolarized probe
/// states at noise level q.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RobustnessPoint {
    pub q: f64,
    pub mes_local_pt_min: f64,
    pub mes_global_pt_min: f64,
    pub gamma_local_pt_min: f64,
    pub gamma_global_pt_min: f64,
}

/// PT-minimal eigenvalues of (Φ_q ⊗ Φ_q) and Φ_q^{AB} outputs of |Psi+>
/// and |gamma> = (|11> + |dd>)/sqrt(2) on a d x d system.
pub fn robustness_curves(d: usize, q: f64) -> Result<RobustnessPoint> {
    if d < 2 {
        return Err(EaError::UnsupportedDims {
            detail: format!("robustness needs d >= 2, got {d}"),
        });
    }
    let dims = DimPair::new(d, d);
    validate_q(d, q)?;
    validate_q(d * d, q)?;
    let local = depolarizing_product(dims, q, q)?;
    let global = depolarizing_global(dims, q)?;

    let mes = mes_projector(d);
    let gamma_vec = rank2_mes_vector(dims);
    let gamma = ComplexMatrix::outer(&gamma_vec, &gamma_vec);

    let pt_min = |state: &ComplexMatrix| -> Result<f64> {
        let pt = partial_transpose(state, dims, Subsystem::B)?;
        Ok(hermitian_eig(&pt.hermitize())?.min_eigenvalue())
    };

    Ok(RobustnessPoint {
        q,
        mes_local_pt_min: pt_min(&local.apply(&mes)?)?,
        mes_global_pt_min: pt_min(&global.apply(&mes)?)?,
        gamma_local_pt_min: pt_min(&local.apply(&gamma)?)?,
        gamma_global_pt_min: pt_min(&global.apply(&gamma)?)?,
    })
}

/// Locate the zero of a monotone curve q -> f(q) by bisection to `xtol`.
pub fn bisect_zero(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(EaError::Infeasible {
            constraint: "bisection bracket",
            detail: format!("f({lo}) = {flo:.3e}, f({hi}) = {fhi:.3e} have equal signs"),
        });
    }
    let mut flo = flo;
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests;
