//! Three-valued classification predicates with replayable certificates.
//!
//! Every predicate returns a [`Classification`]: a criterion, a status that
//! is `CERTIFIED_YES`, `CERTIFIED_NO` or `UNKNOWN`, and for every certified
//! refutation a certificate that re-evaluates to a violation. Separability
//! is PPT-decidable only at 2x2 and 2x3, so `UNKNOWN` is a structural
//! outcome, not an error.

mod block_positive;
mod ea;

pub use block_positive::{block_positivity, replay_product_pair, BlockPositiveWitnessSearch};
pub use ea::{ea_status, pea_witness_search, EaSearchConfig};

use serde::{Deserialize, Serialize};

use crate::channel_core::{depolarizing_eb_range, Channel, ChannelKind};
use crate::error::{EaError, Result};
use crate::tensor_linalg::{
    hermitian_eig, partial_trace, partial_transpose, Complex64, ComplexMatrix, DimPair, Subsystem,
};
use crate::DEFAULT_TOL;

/// Criterion a classification speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    Cp,
    Tp,
    Unital,
    Eb,
    PositiveMap,
    Pea,
    Ea,
}

/// Three-valued verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "CERTIFIED_YES")]
    CertifiedYes,
    #[serde(rename = "CERTIFIED_NO")]
    CertifiedNo,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

/// Serializable complex vector: list of [re, im].
pub type JsonVector = Vec<[f64; 2]>;
/// Serializable complex matrix: nested lists of [re, im].
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn to_json_vector(v: &[Complex64]) -> JsonVector {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_json_vector(v: &JsonVector) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn to_json_matrix(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn from_json_matrix(m: &JsonMatrix) -> ComplexMatrix {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|row| row.iter().map(|p| Complex64::new(p[0], p[1])).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

/// Evidence attached to a certified verdict; every `CERTIFIED_NO` carries
/// one and can be replayed against the object it classifies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Eigenvector with negative eigenvalue of the relevant Hermitian form.
    Eigenvector { eigenvalue: f64, vector: JsonVector },
    /// Product pair violating block positivity: <x⊗y| M |x⊗y> = value < 0.
    ProductPair { value: f64, x: JsonVector, y: JsonVector },
    /// Pure input state whose output has a negative PT expectation on
    /// `witness` (entangled output across the internal cut).
    InputState {
        pt_value: f64,
        input: JsonVector,
        witness: JsonVector,
    },
    /// Block-positive operator and state with tr[(xi ⊗ rho) Omega] < 0.
    WitnessPair { value: f64, xi: JsonMatrix, rho: JsonMatrix },
    /// Closed-form membership: the region inequality lhs <= rhs.
    Region { name: String, lhs: f64, rhs: f64 },
    /// Constructive resolution certificate (Eq.-(4)-type decomposition).
    Resolution { summary: String, residual: f64 },
}

/// A criterion verdict with tolerance bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub criterion: Criterion,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Classification {
    pub fn yes(criterion: Criterion, certificate: Option<Certificate>, tolerance: f64) -> Self {
        Self {
            criterion,
            status: Status::CertifiedYes,
            certificate,
            tolerance,
            seed: None,
        }
    }

    pub fn no(criterion: Criterion, certificate: Certificate, tolerance: f64) -> Self {
        Self {
            criterion,
            status: Status::CertifiedNo,
            certificate: Some(certificate),
            tolerance,
            seed: None,
        }
    }

    pub fn unknown(criterion: Criterion, tolerance: f64) -> Self {
        Self {
            criterion,
            status: Status::Unknown,
            certificate: None,
            tolerance,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::CertifiedYes
    }

    pub fn is_no(&self) -> bool {
        self.status == Status::CertifiedNo
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::CertifiedYes => "CERTIFIED_YES",
            Status::CertifiedNo => "CERTIFIED_NO",
            Status::Unknown => "UNKNOWN",
        };
        write!(f, "{s}")
    }
}

// ---------------------------------------------------------------------------
// CP / TP / unital.
// ---------------------------------------------------------------------------

/// Complete positivity: the Choi matrix is PSD.
pub fn is_cp(ch: &Channel, tol: f64) -> Result<Classification> {
    let dec = hermitian_eig(&ch.choi().hermitize())?;
    let min = dec.min_eigenvalue();
    if min >= -tol {
        Ok(Classification::yes(Criterion::Cp, None, tol))
    } else {
        Ok(Classification::no(
            Criterion::Cp,
            Certificate::Eigenvector {
                eigenvalue: min,
                vector: to_json_vector(&dec.eigenvector(0)),
            },
            tol,
        ))
    }
}

/// Trace preservation: tr_out of the Choi matrix equals I/din.
pub fn is_tp(ch: &Channel, tol: f64) -> Result<Classification> {
    let din = ch.din();
    let marginal = partial_trace(
        ch.choi(),
        DimPair::new(ch.dout(), din),
        Subsystem::B,
    )?;
    let target = ComplexMatrix::identity(din).scale_re(1.0 / din as f64);
    let dev = marginal.max_abs_diff(&target);
    if dev <= tol {
        Ok(Classification::yes(Criterion::Tp, None, tol))
    } else {
        // The deviation matrix itself is Hermitian; its extremal eigenvector
        // exhibits the trace defect.
        let dec = hermitian_eig(&marginal.sub(&target).hermitize())?;
        let (idx, lam) = extreme_abs(&dec.eigenvalues);
        Ok(Classification::no(
            Criterion::Tp,
            Certificate::Eigenvector {
                eigenvalue: lam,
                vector: to_json_vector(&dec.eigenvector(idx)),
            },
            tol,
        ))
    }
}

/// Unitality: the maximally mixed state is a fixed point.
pub fn is_unital(ch: &Channel, tol: f64) -> Result<Classification> {
    let din = ch.din();
    let dout = ch.dout();
    let input = ComplexMatrix::identity(din).scale_re(1.0 / din as f64);
    let out = ch.apply(&input)?;
    let target = ComplexMatrix::identity(dout).scale_re(1.0 / dout as f64);
    let dev = out.max_abs_diff(&target);
    if dev <= tol {
        Ok(Classification::yes(Criterion::Unital, None, tol))
    } else {
        let dec = hermitian_eig(&out.sub(&target).hermitize())?;
        let (idx, lam) = extreme_abs(&dec.eigenvalues);
        Ok(Classification::no(
            Criterion::Unital,
            Certificate::Eigenvector {
                eigenvalue: lam,
                vector: to_json_vector(&dec.eigenvector(idx)),
            },
            tol,
        ))
    }
}

fn extreme_abs(eigenvalues: &[f64]) -> (usize, f64) {
    let mut idx = 0;
    for (i, l) in eigenvalues.iter().enumerate() {
        if l.abs() > eigenvalues[idx].abs() {
            idx = i;
        }
    }
    (idx, eigenvalues[idx])
}

// ---------------------------------------------------------------------------
// PPT and separability.
// ---------------------------------------------------------------------------

/// Minimal eigenvalue of the partial transpose across the given cut.
pub fn ppt_min_eigenvalue(
    state: &ComplexMatrix,
    dims: DimPair,
    cut: Subsystem,
) -> Result<f64> {
    let pt = partial_transpose(state, dims, cut)?;
    Ok(hermitian_eig(&pt.hermitize())?.min_eigenvalue())
}

/// Separability by the Peres-Horodecki test. Decisive at 2x2 and 2x3; at
/// larger cuts PPT is only necessary, so a PPT state stays `UNKNOWN`.
pub fn is_separable_ppt(
    state: &ComplexMatrix,
    dims: DimPair,
    cut: Subsystem,
    tol: f64,
) -> Result<Classification> {
    let pt = partial_transpose(state, dims, cut)?;
    let dec = hermitian_eig(&pt.hermitize())?;
    let min = dec.min_eigenvalue();
    if min < -tol {
        return Ok(Classification::no(
            Criterion::Eb, // separability questions are reported under EB
            Certificate::Eigenvector {
                eigenvalue: min,
                vector: to_json_vector(&dec.eigenvector(0)),
            },
            tol,
        ));
    }
    if ppt_decidable(dims) {
        Ok(Classification::yes(Criterion::Eb, None, tol))
    } else {
        Ok(Classification::unknown(Criterion::Eb, tol))
    }
}

/// PPT decides separability exactly when dA*dB <= 6.
pub fn ppt_decidable(dims: DimPair) -> bool {
    dims.total() <= 6
}

// ---------------------------------------------------------------------------
// EB status.
// ---------------------------------------------------------------------------

/// Entanglement-breaking status via the separability of the Choi matrix.
///
/// Exact answers: depolarizing families (analytic EB range), local products
/// of depolarizing factors (EB iff both factors are EB), and channels whose
/// Choi matrix lives on a PPT-decidable cut. Otherwise NPT refutes and PPT
/// leaves `UNKNOWN`.
pub fn eb_status(ch: &Channel, tol: f64) -> Result<Classification> {
    match ch.kind() {
        Some(ChannelKind::Depolarizing { d, q }) => {
            return Ok(range_classification(q, depolarizing_eb_range(d), tol))
        }
        Some(ChannelKind::DepolarizingGlobal { d_a, d_b, q }) => {
            return Ok(range_classification(q, depolarizing_eb_range(d_a * d_b), tol))
        }
        Some(ChannelKind::DepolarizingProduct { d_a, q1, d_b, q2 }) => {
            // A local product is EB iff both factors are EB.
            let a = range_classification(q1, depolarizing_eb_range(d_a), tol);
            let b = range_classification(q2, depolarizing_eb_range(d_b), tol);
            let status = if a.is_yes() && b.is_yes() {
                return Ok(Classification::yes(Criterion::Eb, a.certificate, tol));
            } else {
                a.certificate.or(b.certificate)
            };
            return Ok(Classification::no(
                Criterion::Eb,
                status.expect("a NO range classification always carries a certificate"),
                tol,
            ));
        }
        _ => {}
    }
    let dims = DimPair::new(ch.dout(), ch.din());
    is_separable_ppt(ch.choi(), dims, Subsystem::B, tol)
}

fn range_classification(q: f64, (lo, hi): (f64, f64), tol: f64) -> Classification {
    let slack = 1e-12;
    if q >= lo - slack && q <= hi + slack {
        Classification::yes(
            Criterion::Eb,
            Some(Certificate::Region {
                name: format!("{lo:.6} <= q <= {hi:.6}"),
                lhs: q,
                rhs: hi,
            }),
            tol,
        )
    } else {
        Classification::no(
            Criterion::Eb,
            Certificate::Region {
                name: format!("{lo:.6} <= q <= {hi:.6}"),
                lhs: q,
                rhs: hi,
            },
            tol,
        )
    }
}

// ---------------------------------------------------------------------------
// Map positivity.
// ---------------------------------------------------------------------------

/// Positivity of a map via block positivity of its Choi matrix across the
/// out|in cut. Λ_{s,t} instances are certified by the analytic sufficient
/// inequality; unital qubit maps by |λ_j| <= 1; a PSD Choi matrix always
/// certifies. Refutations come from the see-saw product search.
pub fn positivity_status(
    ch: &Channel,
    cfg: &BlockPositiveWitnessSearch,
) -> Result<Classification> {
    let tol = cfg.violation_tolerance;
    match ch.kind() {
        Some(ChannelKind::LambdaSt { d_a, d_b, s, t }) => {
            let spec = crate::channel_core::LambdaSt::new(DimPair::new(d_a, d_b), s, t);
            if spec.is_certified_positive() {
                return Ok(Classification::yes(
                    Criterion::PositiveMap,
                    Some(Certificate::Region {
                        name: "0 <= s <= t <= 1/(d-1) + (1 - 1/(d-1)) s".into(),
                        lhs: t,
                        rhs: spec.positivity_bound(),
                    }),
                    tol,
                ));
            }
        }
        Some(ChannelKind::QubitUnital { l1, l2, l3 }) => {
            let max = l1.abs().max(l2.abs()).max(l3.abs());
            if max <= 1.0 + 1e-12 {
                return Ok(Classification::yes(
                    Criterion::PositiveMap,
                    Some(Certificate::Region {
                        name: "|lambda_j| <= 1".into(),
                        lhs: max,
                        rhs: 1.0,
                    }),
                    tol,
                ));
            }
        }
        _ => {}
    }
    let dims = DimPair::new(ch.dout(), ch.din());
    let mut cls = block_positivity(ch.choi(), dims, cfg)?;
    cls.criterion = Criterion::PositiveMap;
    Ok(cls)
}

/// Default tolerance re-export for callers that do not thread a config.
pub fn default_tol() -> f64 {
    DEFAULT_TOL
}

// ---------------------------------------------------------------------------
// Certificate replay.
// ---------------------------------------------------------------------------

/// Re-evaluate a stored certificate against the channel it classified and
/// return the reproduced violation magnitude (positive when the violation
/// reproduces). Region and resolution certificates replay as `None`.
pub fn replay_certificate(ch: &Channel, cls: &Classification) -> Result<Option<f64>> {
    let Some(cert) = &cls.certificate else {
        return Ok(None);
    };
    match (cls.criterion, cert) {
        (Criterion::Cp, Certificate::Eigenvector { vector, .. }) => {
            let v = from_json_vector(vector);
            let val = ch.choi().expectation(&v).re;
            Ok(Some(-val))
        }
        (Criterion::Eb, Certificate::Eigenvector { vector, .. }) => {
            let dims = DimPair::new(ch.dout(), ch.din());
            let pt = partial_transpose(ch.choi(), dims, Subsystem::B)?;
            let v = from_json_vector(vector);
            Ok(Some(-pt.expectation(&v).re))
        }
        (Criterion::Tp, Certificate::Eigenvector { vector, .. }) => {
            let din = ch.din();
            let marginal = partial_trace(
                ch.choi(),
                DimPair::new(ch.dout(), din),
                Subsystem::B,
            )?;
            let target = ComplexMatrix::identity(din).scale_re(1.0 / din as f64);
            let v = from_json_vector(vector);
            Ok(Some(marginal.sub(&target).expectation(&v).re.abs()))
        }
        (Criterion::Ea, Certificate::InputState { input, witness, .. }) => {
            let v = from_json_vector(input);
            let input_state = ComplexMatrix::outer(&v, &v);
            let out = ch.apply(&input_state)?;
            let dims = ch
                .dims_out()
                .as_pair()
                .ok_or_else(|| EaError::UnsupportedDims {
                    detail: "EA certificates need a bipartite output".into(),
                })?;
            let pt = partial_transpose(&out, dims, Subsystem::B)?;
            let w = from_json_vector(witness);
            Ok(Some(-pt.expectation(&w).re))
        }
        (Criterion::Pea, Certificate::WitnessPair { xi, rho, .. }) => {
            let value = ea::evaluate_pea_witness(ch, &from_json_matrix(xi), &from_json_matrix(rho))?;
            Ok(Some(-value))
        }
        (Criterion::PositiveMap, Certificate::ProductPair { x, y, .. }) => {
            let dims = DimPair::new(ch.dout(), ch.din());
            Ok(Some(-replay_product_pair(
                ch.choi(),
                dims,
                &from_json_vector(x),
                &from_json_vector(y),
            )?))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests;
