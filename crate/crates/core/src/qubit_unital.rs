//! Closed-form classification of 2-locally unital qubit maps.
//!
//! A unital trace-preserving qubit map is, up to unitary pre/postprocessing,
//! Υ[X] = (1/2) Σ_j λ_j tr(σ_j X) σ_j with λ_0 = 1; the triple
//! (λ1, λ2, λ3) scales the Bloch ball axes. Membership of Υ and of the
//! pair Υ⊗Υ in the positive / CP / EB / PEA / EA families reduces to six
//! inequalities in the triple.

use serde::{Deserialize, Serialize};

use crate::channel_core::{Channel, ChannelKind, Dims};
use crate::error::Result;
use crate::tensor_linalg::{hermitian_eig, pauli_matrices, ComplexMatrix};

const BOUNDARY_SLACK: f64 = 1e-12;

/// Bloch-axis scaling coefficients of a unital qubit map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl LambdaTriple {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Self {
        Self { l1, l2, l3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }
}

/// The six membership booleans for Υ and the pair Υ⊗Υ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitalClassification {
    /// Υ positive: |λ_j| <= 1.
    pub positive: bool,
    /// Υ completely positive: 1 ± λ3 >= |λ1 ± λ2|.
    pub cp: bool,
    /// Υ entanglement-breaking: |λ1| + |λ2| + |λ3| <= 1.
    pub eb: bool,
    /// Υ⊗Υ positive: 1 ± λ3² >= |λ1² ± λ2²|.
    pub pair_positive: bool,
    /// Υ⊗Υ positive entanglement-annihilating: λ1² + λ2² + λ3² <= 1.
    pub pair_pea: bool,
    /// Υ⊗Υ entanglement-annihilating: cp && pair_pea.
    pub pair_ea: bool,
}

/// Evaluate the six closed-form memberships, with boundary slack so that
/// analytic boundary cases classify as members.
pub fn classify(t: LambdaTriple) -> UnitalClassification {
    let [l1, l2, l3] = t.as_array();
    let le = |a: f64, b: f64| a <= b + BOUNDARY_SLACK;

    let positive = le(l1.abs(), 1.0) && le(l2.abs(), 1.0) && le(l3.abs(), 1.0);
    let cp = le((l1 + l2).abs(), 1.0 + l3) && le((l1 - l2).abs(), 1.0 - l3);
    let eb = le(l1.abs() + l2.abs() + l3.abs(), 1.0);
    let (s1, s2, s3) = (l1 * l1, l2 * l2, l3 * l3);
    let pair_positive = le((s1 + s2).abs(), 1.0 + s3) && le((s1 - s2).abs(), 1.0 - s3);
    let pair_pea = le(s1 + s2 + s3, 1.0);
    UnitalClassification {
        positive,
        cp,
        eb,
        pair_positive,
        pair_pea,
        pair_ea: cp && pair_pea,
    }
}

/// Build the qubit channel with transfer matrix diag(1, λ1, λ2, λ3) in the
/// normalized Pauli basis.
pub fn to_channel(t: LambdaTriple) -> Channel {
    let transfer = ComplexMatrix::from_diag(&[1.0, t.l1, t.l2, t.l3]);
    Channel::from_transfer(Dims::single(2), Dims::single(2), transfer)
        .expect("4x4 transfer on a qubit is always well-formed")
        .with_kind(Some(ChannelKind::QubitUnital {
            l1: t.l1,
            l2: t.l2,
            l3: t.l3,
        }))
}

/// Reduce an arbitrary unital qubit channel to the canonical diagonal frame.
///
/// The 3x3 Bloch block B_{ab} = tr(σ_a Φ[σ_b])/2 factors as O1 Σ O2^T with
/// rotations; unitary pre/postprocessing can remove the rotations but not
/// the sign of det B, so the canonical triple is (σ1, σ2, sign(det B)·σ3)
/// with singular values sorted descending.
pub fn canonical_triple(ch: &Channel) -> Result<LambdaTriple> {
    let paulis = pauli_matrices();
    let mut bloch = [[0.0f64; 3]; 3];
    for (b, sigma_in) in paulis.iter().skip(1).enumerate() {
        let out = ch.apply(sigma_in)?;
        for (a, sigma_out) in paulis.iter().skip(1).enumerate() {
            bloch[a][b] = 0.5 * sigma_out.matmul(&out).trace().re;
        }
    }
    // Singular values via the spectrum of B^T B.
    let bt_b = ComplexMatrix::from_fn(3, 3, |i, j| {
        let mut acc = 0.0;
        for k in 0..3 {
            acc += bloch[k][i] * bloch[k][j];
        }
        crate::tensor_linalg::Complex64::new(acc, 0.0)
    });
    let dec = hermitian_eig(&bt_b)?;
    let mut sv: Vec<f64> = dec
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let det = det3(&bloch);
    let sign = if det < 0.0 { -1.0 } else { 1.0 };
    Ok(LambdaTriple::new(sv[0], sv[1], sign * sv[2]))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_core::{choi_distance, compose, depolarizing};
    use crate::criteria::{eb_status, is_cp};
    use crate::tensor_linalg::{partial_transpose, seeded_rng, DimPair, Subsystem};
    use rand::Rng;

    #[test]
    fn identity_and_depolarizing_triples() {
        let id = to_channel(LambdaTriple::new(1.0, 1.0, 1.0));
        assert!(choi_distance(&id, &Channel::identity(Dims::single(2))) <= 1e-12);

        let q = 0.3;
        let dep = to_channel(LambdaTriple::new(q, q, q));
        assert!(choi_distance(&dep, &depolarizing(2, q).unwrap()) <= 1e-12);
    }

    #[test]
    fn transpose_triple() {
        // (1, -1, 1) acts as the transposition map; its Choi matrix is the
        // A-transposed maximally entangled projector.
        let ch = to_channel(LambdaTriple::new(1.0, -1.0, 1.0));
        let expected = partial_transpose(
            &crate::tensor_linalg::mes_projector(2),
            DimPair::new(2, 2),
            Subsystem::A,
        )
        .unwrap();
        assert!(ch.choi().max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn classify_examples() {
        let c = classify(LambdaTriple::new(1.0, 1.0, 1.0));
        assert!(c.positive && c.cp && !c.eb && c.pair_positive && !c.pair_pea && !c.pair_ea);

        // Boundary of the pair-PEA ball, and the two-qubit EA threshold.
        let q = 1.0 / 3f64.sqrt();
        let c = classify(LambdaTriple::new(q, q, q));
        assert!(c.pair_pea && c.cp && c.pair_ea);

        let c = classify(LambdaTriple::new(0.9, 0.2, 0.0));
        assert!(c.positive && !c.cp && !c.eb && c.pair_positive && c.pair_pea && !c.pair_ea);
    }

    #[test]
    fn nesting_relations_hold_on_random_triples() {
        let mut rng = seeded_rng(2029);
        for _ in 0..10_000 {
            let t = LambdaTriple::new(
                rng.gen_range(-1.2..1.2),
                rng.gen_range(-1.2..1.2),
                rng.gen_range(-1.2..1.2),
            );
            let c = classify(t);
            if c.eb {
                assert!(c.pair_pea, "EB implies pair PEA at {t:?}");
            }
            if c.pair_pea {
                assert!(c.positive, "pair PEA implies positive at {t:?}");
            }
            if c.cp {
                assert!(c.positive, "CP implies positive at {t:?}");
            }
            assert_eq!(c.pair_ea, c.cp && c.pair_pea);
        }
    }

    #[test]
    fn oracle_equivalence_on_random_triples() {
        // Items (iv) and (v) against the numerical CP / EB tests of the
        // squared map Υ², which is again diagonal with squared scalings.
        let mut rng = seeded_rng(4099);
        for _ in 0..200 {
            let t = LambdaTriple::new(
                rng.gen_range(-1.1..1.1),
                rng.gen_range(-1.1..1.1),
                rng.gen_range(-1.1..1.1),
            );
            let c = classify(t);
            let squared = compose(&to_channel(t), &to_channel(t)).unwrap();
            let cp = is_cp(&squared, 1e-9).unwrap();
            assert_eq!(c.pair_positive, cp.is_yes(), "item (iv) mismatch at {t:?}");
            let eb = eb_status(&squared, 1e-9).unwrap();
            assert_eq!(c.pair_pea, eb.is_yes(), "item (v) mismatch at {t:?}");
        }
    }

    #[test]
    fn canonical_frame_reduction() {
        use crate::channel_core::Channel as Ch;
        let mut rng = seeded_rng(7001);
        // Conjugate a diagonal map by random unitaries and recover the triple.
        let t = LambdaTriple::new(0.8, 0.5, 0.4);
        let base = to_channel(t);
        let u = crate::tensor_linalg::random_unitary(2, &mut rng);
        let v = crate::tensor_linalg::random_unitary(2, &mut rng);
        let pre = Ch::from_kraus(Dims::single(2), Dims::single(2), vec![u]).unwrap();
        let post = Ch::from_kraus(Dims::single(2), Dims::single(2), vec![v]).unwrap();
        let rotated = compose(&post, &compose(&base, &pre).unwrap()).unwrap();
        let recovered = canonical_triple(&rotated).unwrap();
        // Rotations may permute axes; compare sorted magnitudes and the
        // determinant sign.
        let mut got = recovered.as_array().map(f64::abs);
        let mut want = t.as_array().map(f64::abs);
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-9);
        }
        let prod_got: f64 = recovered.as_array().iter().product();
        let prod_want: f64 = t.as_array().iter().product();
        assert_eq!(prod_got.signum(), prod_want.signum());
    }
}
