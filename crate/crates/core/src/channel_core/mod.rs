//! Channel data model with interconvertible representations.
//!
//! A [`Channel`] is a linear map between operator spaces carried in one of
//! three representations — Kraus operators, the Choi matrix of Eq. (1)
//! normalization (trace 1 for trace-preserving maps), or the transfer matrix
//! in the product Gell-Mann basis of its subsystem factors. Conversions are
//! memoized behind `OnceLock`s, so a channel is immutable and cheap to share
//! across threads.
//!
//! Maps that are not completely positive (transposition, the Λ_{s,t}
//! family) and trace-decreasing maps (one-sided EB operations) are
//! first-class citizens: channel predicates live in [`crate::criteria`], not
//! in the constructors.

mod convert;
mod json;

pub use json::{channel_from_json, channel_to_json, ChannelJson};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{EaError, Result};
use crate::tensor_linalg::{
    gell_mann_basis, hermitian_eig, kron, mes_projector, partial_trace, permute_legs,
    Complex64, ComplexMatrix, DimPair, OperatorBasis, Subsystem,
};

/// Subsystem factorization of a system: one factor for a simple system,
/// two for a bipartite one. The factor list fixes the product operator
/// basis used by transfer-matrix representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    factors: Vec<usize>,
}

impl Dims {
    pub fn single(d: usize) -> Self {
        assert!(d >= 2, "dimension must be >= 2");
        Self { factors: vec![d] }
    }

    pub fn pair(a: usize, b: usize) -> Self {
        assert!(a >= 2 && b >= 2, "subsystem dimensions must be >= 2");
        Self { factors: vec![a, b] }
    }

    pub fn from_factors(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() || factors.len() > 2 || factors.iter().any(|&d| d < 2) {
            return Err(EaError::UnsupportedDims {
                detail: format!("factor list {factors:?} (need 1 or 2 factors, each >= 2)"),
            });
        }
        Ok(Self {
            factors: factors.to_vec(),
        })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn as_pair(&self) -> Option<DimPair> {
        match self.factors[..] {
            [a, b] => Some(DimPair::new(a, b)),
            _ => None,
        }
    }

    /// Number of transfer-matrix basis elements (total dimension squared).
    pub fn basis_len(&self) -> usize {
        self.total() * self.total()
    }

    /// Product Gell-Mann basis matching this factorization.
    pub fn operator_basis(&self) -> OperatorBasis {
        match self.factors[..] {
            [d] => gell_mann_basis(d),
            [a, b] => OperatorBasis::product(&gell_mann_basis(a), &gell_mann_basis(b)),
            _ => unreachable!(),
        }
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", strs.join("x"))
    }
}

/// Analytic provenance of a channel, used by the classifiers to answer
/// family questions (EB range of depolarizing noise, exact EA regions)
/// exactly instead of numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Φ_q = q Id + (1-q) Tr on a single d-dimensional system.
    Depolarizing { d: usize, q: f64 },
    /// Φ_{q1} ⊗ Φ_{q2} on a bipartite system.
    DepolarizingProduct { d_a: usize, q1: f64, d_b: usize, q2: f64 },
    /// Global Φ_q on the full bipartite system.
    DepolarizingGlobal { d_a: usize, d_b: usize, q: f64 },
    /// Two-parameter diagonal map Λ_{s,t} on a bipartite system.
    LambdaSt { d_a: usize, d_b: usize, s: f64, t: f64 },
    /// Unital qubit map with Bloch scalings (λ1, λ2, λ3).
    QubitUnital { l1: f64, l2: f64, l3: f64 },
}

/// Primary (construction-time) representation.
#[derive(Debug, Clone)]
pub enum Repr {
    Kraus(Vec<ComplexMatrix>),
    Choi(ComplexMatrix),
    Transfer(ComplexMatrix),
    /// Diagonal transfer matrix in the product Gell-Mann basis; the fast
    /// path for the depolarizing and Λ_{s,t} families.
    TransferDiag(Vec<f64>),
}

impl Repr {
    pub fn name(&self) -> &'static str {
        match self {
            Repr::Kraus(_) => "kraus",
            Repr::Choi(_) => "choi",
            Repr::Transfer(_) => "transfer",
            Repr::TransferDiag(_) => "transfer",
        }
    }
}

/// A linear map between operator spaces.
pub struct Channel {
    dims_in: Dims,
    dims_out: Dims,
    kind: Option<ChannelKind>,
    primary: Repr,
    choi_cache: OnceLock<ComplexMatrix>,
    kraus_cache: OnceLock<Result<Vec<ComplexMatrix>>>,
    transfer_cache: OnceLock<ComplexMatrix>,
}

impl std::fmt::Debug for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Channel")
            .field("dims_in", &self.dims_in)
            .field("dims_out", &self.dims_out)
            .field("repr", &self.primary.name())
            .field("kind", &self.kind)
            .finish()
    }
}

impl Clone for Channel {
    fn clone(&self) -> Self {
        let out = Self::new(
            self.dims_in.clone(),
            self.dims_out.clone(),
            self.primary.clone(),
            self.kind,
        );
        if let Some(c) = self.choi_cache.get() {
            let _ = out.choi_cache.set(c.clone());
        }
        out
    }
}

impl Channel {
    fn new(dims_in: Dims, dims_out: Dims, primary: Repr, kind: Option<ChannelKind>) -> Self {
        Self {
            dims_in,
            dims_out,
            kind,
            primary,
            choi_cache: OnceLock::new(),
            kraus_cache: OnceLock::new(),
            transfer_cache: OnceLock::new(),
        }
    }

    // -- constructors ------------------------------------------------------

    pub fn from_kraus(dims_in: Dims, dims_out: Dims, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(EaError::InvalidChannel {
                field: "kraus".into(),
                reason: "at least one Kraus operator required".into(),
            });
        }
        for k in &kraus {
            if k.rows() != dims_out.total() || k.cols() != dims_in.total() {
                return Err(EaError::InvalidChannel {
                    field: "kraus".into(),
                    reason: format!(
                        "operator is {}x{}, expected {}x{}",
                        k.rows(),
                        k.cols(),
                        dims_out.total(),
                        dims_in.total()
                    ),
                });
            }
        }
        Ok(Self::new(dims_in, dims_out, Repr::Kraus(kraus), None))
    }

    pub fn from_choi(dims_in: Dims, dims_out: Dims, choi: ComplexMatrix) -> Result<Self> {
        let expect = dims_out.total() * dims_in.total();
        if !choi.is_square() || choi.rows() != expect {
            return Err(EaError::InvalidChannel {
                field: "choi".into(),
                reason: format!("matrix is {}x{}, expected {expect}x{expect}", choi.rows(), choi.cols()),
            });
        }
        Ok(Self::new(dims_in, dims_out, Repr::Choi(choi), None))
    }

    pub fn from_transfer(dims_in: Dims, dims_out: Dims, transfer: ComplexMatrix) -> Result<Self> {
        if transfer.rows() != dims_out.basis_len() || transfer.cols() != dims_in.basis_len() {
            return Err(EaError::InvalidChannel {
                field: "transfer".into(),
                reason: format!(
                    "matrix is {}x{}, expected {}x{}",
                    transfer.rows(),
                    transfer.cols(),
                    dims_out.basis_len(),
                    dims_in.basis_len()
                ),
            });
        }
        Ok(Self::new(dims_in, dims_out, Repr::Transfer(transfer), None))
    }

    fn from_transfer_diag(dims: Dims, diag: Vec<f64>, kind: Option<ChannelKind>) -> Self {
        debug_assert_eq!(diag.len(), dims.basis_len());
        Self::new(dims.clone(), dims, Repr::TransferDiag(diag), kind)
    }

    /// Identity channel.
    pub fn identity(dims: Dims) -> Self {
        let diag = vec![1.0; dims.basis_len()];
        let kind = match dims.factors() {
            [d] => Some(ChannelKind::Depolarizing { d: *d, q: 1.0 }),
            [a, b] => Some(ChannelKind::DepolarizingGlobal { d_a: *a, d_b: *b, q: 1.0 }),
            _ => None,
        };
        Self::from_transfer_diag(dims, diag, kind)
    }

    /// The trace map Tr[X] = tr(X) I/d, i.e. Φ_0.
    pub fn trace_map(d: usize) -> Self {
        depolarizing(d, 0.0).expect("q=0 is always in the CP range")
    }

    // -- accessors ----------------------------------------------------------

    pub fn dims_in(&self) -> &Dims {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &Dims {
        &self.dims_out
    }

    pub fn din(&self) -> usize {
        self.dims_in.total()
    }

    pub fn dout(&self) -> usize {
        self.dims_out.total()
    }

    pub fn kind(&self) -> Option<ChannelKind> {
        self.kind
    }

    pub(crate) fn with_kind(mut self, kind: Option<ChannelKind>) -> Self {
        self.kind = kind;
        self
    }

    pub fn primary_repr(&self) -> &Repr {
        &self.primary
    }

    /// Diagonal transfer entries when the channel was built from a diagonal
    /// family; `None` otherwise.
    pub fn diag_transfer(&self) -> Option<&[f64]> {
        match &self.primary {
            Repr::TransferDiag(d) => Some(d),
            _ => None,
        }
    }

    /// The Choi matrix (computed once, then cached).
    pub fn choi(&self) -> &ComplexMatrix {
        self.choi_cache.get_or_init(|| match &self.primary {
            Repr::Choi(c) => c.clone(),
            Repr::Kraus(ks) => convert::choi_from_kraus(ks, self.din()),
            Repr::Transfer(t) => {
                convert::choi_from_transfer(t, &self.dims_in, &self.dims_out)
            }
            Repr::TransferDiag(d) => convert::choi_from_transfer_diag(d, &self.dims_in),
        })
    }

    /// Kraus operators extracted from the Choi matrix (eigenvalue cutoff
    /// 1e-10). Fails when the Choi matrix is not PSD: the map is not CP and
    /// has no Kraus form.
    pub fn kraus(&self) -> Result<&[ComplexMatrix]> {
        let res = self.kraus_cache.get_or_init(|| {
            if let Repr::Kraus(ks) = &self.primary {
                return Ok(ks.clone());
            }
            convert::kraus_from_choi(self.choi(), self.din(), self.dout())
        });
        match res {
            Ok(ks) => Ok(ks),
            Err(e) => Err(e.clone()),
        }
    }

    /// Transfer matrix in the product Gell-Mann bases of `dims_out`/`dims_in`.
    pub fn transfer(&self) -> &ComplexMatrix {
        self.transfer_cache.get_or_init(|| match &self.primary {
            Repr::Transfer(t) => t.clone(),
            Repr::TransferDiag(d) => {
                let n = d.len();
                let mut m = ComplexMatrix::zeros(n, n);
                for (i, v) in d.iter().enumerate() {
                    m[(i, i)] = Complex64::new(*v, 0.0);
                }
                m
            }
            _ => convert::transfer_from_choi(self.choi(), &self.dims_in, &self.dims_out),
        })
    }

    /// Apply the map to an operator.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.expect_square(self.din())?;
        // Family fast paths.
        match self.kind {
            Some(ChannelKind::Depolarizing { d, q }) => {
                return Ok(depolarize_action(x, d, q));
            }
            Some(ChannelKind::DepolarizingGlobal { d_a, d_b, q }) => {
                return Ok(depolarize_action(x, d_a * d_b, q));
            }
            Some(ChannelKind::DepolarizingProduct { d_a, q1, d_b, q2 }) => {
                return depolarize_product_action(x, d_a, q1, d_b, q2);
            }
            _ => {}
        }
        match &self.primary {
            Repr::Kraus(ks) => Ok(apply_kraus(ks, x)),
            _ => {
                if let Some(Ok(ks)) = self.kraus_cache.get().map(|r| r.as_ref()) {
                    return Ok(apply_kraus(ks, x));
                }
                Ok(convert::apply_via_choi(self.choi(), x, self.din(), self.dout()))
            }
        }
    }
}

fn apply_kraus(ks: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(ks[0].rows(), ks[0].rows());
    for k in ks {
        out = out.add(&k.matmul(x).matmul(&k.dagger()));
    }
    out
}

fn depolarize_action(x: &ComplexMatrix, d: usize, q: f64) -> ComplexMatrix {
    let mut out = x.scale_re(q);
    let t = x.trace() * ((1.0 - q) / d as f64);
    for i in 0..d {
        out[(i, i)] += t;
    }
    out
}

fn depolarize_product_action(
    x: &ComplexMatrix,
    d_a: usize,
    q1: f64,
    d_b: usize,
    q2: f64,
) -> Result<ComplexMatrix> {
    let dims = DimPair::new(d_a, d_b);
    // (Φ_{q1} ⊗ Φ_{q2})[X] expanded over the Id/Tr mixture of each factor.
    let marg_a = partial_trace(x, dims, Subsystem::A)?;
    let marg_b = partial_trace(x, dims, Subsystem::B)?;
    let ia = ComplexMatrix::identity(d_a).scale_re(1.0 / d_a as f64);
    let ib = ComplexMatrix::identity(d_b).scale_re(1.0 / d_b as f64);
    let mut out = x.scale_re(q1 * q2);
    out.axpy(
        Complex64::new(q1 * (1.0 - q2), 0.0),
        &kron(&marg_a, &ib),
    );
    out.axpy(
        Complex64::new((1.0 - q1) * q2, 0.0),
        &kron(&ia, &marg_b),
    );
    let full_tr = x.trace() * ((1.0 - q1) * (1.0 - q2) / (d_a * d_b) as f64);
    for i in 0..d_a * d_b {
        out[(i, i)] += full_tr;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Map families.
// ---------------------------------------------------------------------------

/// CP parameter range of the depolarizing family on a d-dimensional system.
pub fn depolarizing_cp_range(d: usize) -> (f64, f64) {
    (-1.0 / ((d * d - 1) as f64), 1.0)
}

/// EB parameter range of the depolarizing family: [-1/(d^2-1), 1/(d+1)].
pub fn depolarizing_eb_range(d: usize) -> (f64, f64) {
    (-1.0 / ((d * d - 1) as f64), 1.0 / (d as f64 + 1.0))
}

/// Depolarizing channel Φ_q = q Id + (1-q) Tr on a d-dimensional system.
pub fn depolarizing(d: usize, q: f64) -> Result<Channel> {
    let (lo, hi) = depolarizing_cp_range(d);
    if !(lo - 1e-12..=hi + 1e-12).contains(&q) {
        return Err(EaError::OutsideCpRange { q, lo, hi });
    }
    let dims = Dims::single(d);
    let mut diag = vec![q; dims.basis_len()];
    diag[0] = 1.0;
    Ok(Channel::from_transfer_diag(
        dims,
        diag,
        Some(ChannelKind::Depolarizing { d, q }),
    ))
}

/// Global depolarizing channel on a bipartite system (CP range with the
/// total dimension dA*dB).
pub fn depolarizing_global(dims: DimPair, q: f64) -> Result<Channel> {
    let d = dims.total();
    let (lo, hi) = depolarizing_cp_range(d);
    if !(lo - 1e-12..=hi + 1e-12).contains(&q) {
        return Err(EaError::OutsideCpRange { q, lo, hi });
    }
    let dd = Dims::pair(dims.a, dims.b);
    let mut diag = vec![q; dd.basis_len()];
    diag[0] = 1.0;
    Ok(Channel::from_transfer_diag(
        dd,
        diag,
        Some(ChannelKind::DepolarizingGlobal { d_a: dims.a, d_b: dims.b, q }),
    ))
}

/// Local depolarizing noise Φ_{q1} ⊗ Φ_{q2}.
pub fn depolarizing_product(dims: DimPair, q1: f64, q2: f64) -> Result<Channel> {
    let a = depolarizing(dims.a, q1)?;
    let b = depolarizing(dims.b, q2)?;
    tensor(&a, &b)
}

/// Two-parameter diagonal trace-preserving map Λ_{s,t}.
///
/// Transfer entries in the product basis: 1 at the (0,0) index pair, `s`
/// where exactly one Gell-Mann index is zero, `t` where both are nonzero.
/// Positivity is *not* required for construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSt {
    pub dims: DimPair,
    pub s: f64,
    pub t: f64,
}

impl LambdaSt {
    pub fn new(dims: DimPair, s: f64, t: f64) -> Self {
        Self { dims, s, t }
    }

    pub fn square(d: usize, s: f64, t: f64) -> Self {
        Self::new(DimPair::new(d, d), s, t)
    }

    /// Upper bound of the sufficient positivity condition,
    /// 1/(d-1) + (1 - 1/(d-1)) s with d = max(dA, dB).
    pub fn positivity_bound(&self) -> f64 {
        let d = self.dims.a.max(self.dims.b) as f64;
        1.0 / (d - 1.0) + (1.0 - 1.0 / (d - 1.0)) * self.s
    }

    /// Sufficient condition for positivity: 0 <= s <= t <= bound.
    pub fn is_certified_positive(&self) -> bool {
        let slack = 1e-12;
        self.s >= -slack && self.s <= self.t + slack && self.t <= self.positivity_bound() + slack
    }
}

/// Build the channel for a Λ_{s,t} specification.
pub fn lambda_st(spec: LambdaSt) -> Channel {
    let dims = Dims::pair(spec.dims.a, spec.dims.b);
    let (na, nb) = (spec.dims.a * spec.dims.a, spec.dims.b * spec.dims.b);
    let mut diag = Vec::with_capacity(na * nb);
    for j in 0..na {
        for k in 0..nb {
            diag.push(match (j, k) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => spec.s,
                _ => spec.t,
            });
        }
    }
    Channel::from_transfer_diag(
        dims,
        diag,
        Some(ChannelKind::LambdaSt {
            d_a: spec.dims.a,
            d_b: spec.dims.b,
            s: spec.s,
            t: spec.t,
        }),
    )
}

/// A rank-1 operation O[X] = A X A^dag applied to one subsystem.
#[derive(Debug, Clone)]
pub struct EbOperation {
    pub a_op: ComplexMatrix,
    pub target: Subsystem,
}

impl EbOperation {
    /// Build |phi><psi| on the targeted subsystem.
    pub fn new(phi: &[Complex64], psi: &[Complex64], target: Subsystem) -> Self {
        Self {
            a_op: ComplexMatrix::outer(phi, psi),
            target,
        }
    }

    /// Second singular value of the operator (zero for exact rank one).
    pub fn second_singular_value(&self) -> Result<f64> {
        let gram = self.a_op.dagger().matmul(&self.a_op);
        let dec = hermitian_eig(&gram)?;
        let n = dec.eigenvalues.len();
        if n < 2 {
            return Ok(0.0);
        }
        Ok(dec.eigenvalues[n - 2].max(0.0).sqrt())
    }
}

/// One-sided map (O_EB ⊗ Id) or (Id ⊗ O_EB) as a (generally
/// trace-decreasing) CP channel on the bipartite system `dims`.
pub fn eb_operation_channel(op: &EbOperation, dims: DimPair) -> Result<Channel> {
    let target_dim = match op.target {
        Subsystem::A => dims.a,
        Subsystem::B => dims.b,
    };
    op.a_op.expect_square(target_dim)?;
    let sigma2 = op.second_singular_value()?;
    if sigma2 > 1e-12 {
        return Err(EaError::NotRankOne {
            second_singular_value: sigma2,
        });
    }
    let kraus = match op.target {
        Subsystem::A => kron(&op.a_op, &ComplexMatrix::identity(dims.b)),
        Subsystem::B => kron(&ComplexMatrix::identity(dims.a), &op.a_op),
    };
    Channel::from_kraus(Dims::pair(dims.a, dims.b), Dims::pair(dims.a, dims.b), vec![kraus])
}

// ---------------------------------------------------------------------------
// Channel algebra.
// ---------------------------------------------------------------------------

/// Composition outer ∘ inner (inner acts first).
pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
    if outer.dims_in != inner.dims_out {
        return Err(EaError::DimensionMismatch {
            expected: outer.din(),
            got: inner.dout(),
        });
    }
    let kind = match (outer.kind, inner.kind) {
        (
            Some(ChannelKind::Depolarizing { d, q }),
            Some(ChannelKind::Depolarizing { d: d2, q: q2 }),
        ) if d == d2 => Some(ChannelKind::Depolarizing { d, q: q * q2 }),
        (
            Some(ChannelKind::DepolarizingGlobal { d_a, d_b, q }),
            Some(ChannelKind::DepolarizingGlobal { d_a: a2, d_b: b2, q: q2 }),
        ) if (d_a, d_b) == (a2, b2) => Some(ChannelKind::DepolarizingGlobal { d_a, d_b, q: q * q2 }),
        _ => None,
    };

    if let (Some(do_), Some(di)) = (outer.diag_transfer(), inner.diag_transfer()) {
        let diag: Vec<f64> = do_.iter().zip(di).map(|(a, b)| a * b).collect();
        return Ok(Channel::from_transfer_diag(inner.dims_in.clone(), diag, kind));
    }

    // Kraus route when both sides are CP.
    if let (Ok(ko), Ok(ki)) = (outer.kraus(), inner.kraus()) {
        let mut ks = Vec::with_capacity(ko.len() * ki.len());
        for a in ko {
            for b in ki {
                ks.push(a.matmul(b));
            }
        }
        return Ok(Channel::from_kraus(inner.dims_in.clone(), outer.dims_out.clone(), ks)?
            .with_kind(kind));
    }

    // Transfer route: E_{outer∘inner} = E_outer * E_inner.
    let t = outer.transfer().matmul(inner.transfer());
    Ok(Channel::from_transfer(inner.dims_in.clone(), outer.dims_out.clone(), t)?.with_kind(kind))
}

/// Tensor product of two single-system channels, A on the slow factor.
pub fn tensor(ch_a: &Channel, ch_b: &Channel) -> Result<Channel> {
    let (da_in, db_in) = match (ch_a.dims_in.factors(), ch_b.dims_in.factors()) {
        ([a], [b]) => (*a, *b),
        _ => {
            return Err(EaError::UnsupportedDims {
                detail: "tensor expects two single-factor channels".into(),
            })
        }
    };
    let (da_out, db_out) = match (ch_a.dims_out.factors(), ch_b.dims_out.factors()) {
        ([a], [b]) => (*a, *b),
        _ => unreachable!("single-factor inputs have single-factor outputs"),
    };

    let kind = match (ch_a.kind, ch_b.kind) {
        (
            Some(ChannelKind::Depolarizing { d: da, q: q1 }),
            Some(ChannelKind::Depolarizing { d: db, q: q2 }),
        ) => Some(ChannelKind::DepolarizingProduct { d_a: da, q1, d_b: db, q2 }),
        _ => None,
    };

    if let (Some(ta), Some(tb)) = (ch_a.diag_transfer(), ch_b.diag_transfer()) {
        let mut diag = Vec::with_capacity(ta.len() * tb.len());
        for a in ta {
            for b in tb {
                diag.push(a * b);
            }
        }
        return Ok(Channel::from_transfer_diag(
            Dims::pair(da_in, db_in),
            diag,
            kind,
        ));
    }

    if let (Ok(ka), Ok(kb)) = (ch_a.kraus(), ch_b.kraus()) {
        let mut ks = Vec::with_capacity(ka.len() * kb.len());
        for a in ka {
            for b in kb {
                ks.push(kron(a, b));
            }
        }
        return Ok(Channel::from_kraus(
            Dims::pair(da_in, db_in),
            Dims::pair(da_out, db_out),
            ks,
        )?
        .with_kind(kind));
    }

    // General (possibly non-CP) route: reorder legs of the Choi product,
    // (outA, inA, outB, inB) -> (outA, outB, inA, inB).
    let prod = kron(ch_a.choi(), ch_b.choi());
    let dims = [da_out, da_in, db_out, db_in];
    let choi = permute_legs(&prod, &dims, &[0, 2, 1, 3])?;
    Ok(
        Channel::from_choi(Dims::pair(da_in, db_in), Dims::pair(da_out, db_out), choi)?
            .with_kind(kind),
    )
}

/// Convex mixture of channels with nonnegative weights summing to one.
pub fn mix(weights: &[f64], channels: &[&Channel]) -> Result<Channel> {
    if weights.len() != channels.len() || channels.is_empty() {
        return Err(EaError::BadWeights {
            detail: format!("{} weights for {} channels", weights.len(), channels.len()),
        });
    }
    if let Some(w) = weights.iter().find(|&&w| w < -1e-12) {
        return Err(EaError::BadWeights {
            detail: format!("negative weight {w}"),
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(EaError::BadWeights {
            detail: format!("sum {sum}"),
        });
    }
    let first = channels[0];
    for ch in channels {
        if ch.dims_in != first.dims_in || ch.dims_out != first.dims_out {
            return Err(EaError::DimensionMismatch {
                expected: first.din(),
                got: ch.din(),
            });
        }
    }

    let kind = mixed_depolarizing_kind(weights, channels);

    if channels.iter().all(|c| c.diag_transfer().is_some()) {
        let n = first.diag_transfer().unwrap().len();
        let mut diag = vec![0.0; n];
        for (w, ch) in weights.iter().zip(channels) {
            for (acc, v) in diag.iter_mut().zip(ch.diag_transfer().unwrap()) {
                *acc += w * v;
            }
        }
        return Ok(Channel::from_transfer_diag(first.dims_in.clone(), diag, kind));
    }

    let n = first.dout() * first.din();
    let mut choi = ComplexMatrix::zeros(n, n);
    for (w, ch) in weights.iter().zip(channels) {
        choi.axpy(Complex64::new(*w, 0.0), ch.choi());
    }
    Ok(Channel::from_choi(first.dims_in.clone(), first.dims_out.clone(), choi)?.with_kind(kind))
}

/// Φ_q is affine in q, so a mixture of same-dimension depolarizing channels
/// is depolarizing with the averaged parameter.
fn mixed_depolarizing_kind(weights: &[f64], channels: &[&Channel]) -> Option<ChannelKind> {
    let mut q_acc = 0.0;
    let mut dim: Option<usize> = None;
    for (w, ch) in weights.iter().zip(channels) {
        match ch.kind {
            Some(ChannelKind::Depolarizing { d, q }) => {
                if dim.is_some_and(|d0| d0 != d) {
                    return None;
                }
                dim = Some(d);
                q_acc += w * q;
            }
            _ => return None,
        }
    }
    dim.map(|d| ChannelKind::Depolarizing { d, q: q_acc })
}

/// Max-abs distance between the Choi matrices of two maps.
pub fn choi_distance(a: &Channel, b: &Channel) -> f64 {
    a.choi().max_abs_diff(b.choi())
}

/// Choi matrix of the maximally entangled projector for reference checks.
pub fn identity_choi(d: usize) -> ComplexMatrix {
    mes_projector(d)
}

/// Flatten |phi><psi| Kraus data of a measure-and-prepare (Holevo) channel:
/// prepare `phis[k]` whenever the rank-1 POVM built from `psis[k]` fires.
pub fn holevo_channel(
    d: usize,
    pairs: &[(Vec<Complex64>, Vec<Complex64>)],
) -> Result<Channel> {
    let kraus: Vec<ComplexMatrix> = pairs
        .iter()
        .map(|(phi, psi)| ComplexMatrix::outer(phi, psi))
        .collect();
    Channel::from_kraus(Dims::single(d), Dims::single(d), kraus)
}

pub use convert::apply_via_choi;

#[cfg(test)]
mod tests;
