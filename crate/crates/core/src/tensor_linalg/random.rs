//! Seeded sampling of states and operators.
//!
//! All sampling goes through `ChaCha8Rng` so results are reproducible across
//! platforms and parallel schedules; sub-streams derived from a master seed
//! keep per-task determinism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{vec_normalize, Complex64, ComplexMatrix};

/// RNG seeded from a master seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream `index` of the master seed.
pub fn derived_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Standard normal via Box-Muller.
fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gauss_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gauss(rng), gauss(rng))
}

/// Haar-distributed unit vector in C^d.
pub fn random_unit_vector(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    assert!(d >= 1);
    let mut v: Vec<Complex64> = (0..d).map(|_| gauss_complex(rng)).collect();
    vec_normalize(&mut v);
    v
}

/// Random density matrix rho = G G^dag / tr(G G^dag), G square Ginibre.
pub fn random_density(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(d >= 1);
    let g = ComplexMatrix::from_fn(d, d, |_, _| gauss_complex(rng));
    let m = g.matmul(&g.dagger());
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Random Hermitian matrix with Gaussian entries, max-abs O(1).
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| gauss_complex(rng)).hermitize()
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    use super::matrix::{vec_inner, vec_norm};
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| gauss_complex(rng)).collect();
        for u in &cols {
            let c = vec_inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
        if vec_norm(&v) < 1e-8 {
            continue; // essentially never; resample
        }
        vec_normalize(&mut v);
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, d, |r, c| cols[c][r])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_under_fixed_seed() {
        let a = random_unit_vector(5, &mut seeded_rng(42));
        let b = random_unit_vector(5, &mut seeded_rng(42));
        assert_eq!(a, b);
        let ra = random_density(3, &mut seeded_rng(7));
        let rb = random_density(3, &mut seeded_rng(7));
        assert_eq!(ra.data(), rb.data());
    }

    #[test]
    fn density_is_normalized_and_psd() {
        let mut rng = seeded_rng(1);
        for _ in 0..20 {
            let rho = random_density(4, &mut rng);
            assert!((rho.trace().re - 1.0).abs() <= 1e-12);
            assert!(rho.is_hermitian(1e-12));
            let dec = crate::tensor_linalg::hermitian_eig(&rho).unwrap();
            assert!(dec.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn ensemble_mean_is_maximally_mixed() {
        // Law of large numbers over the unitarily invariant ensemble.
        let mut rng = seeded_rng(2024);
        let n = 10_000;
        let mut mean = ComplexMatrix::zeros(2, 2);
        for _ in 0..n {
            mean.axpy(Complex64::new(1.0 / n as f64, 0.0), &random_density(2, &mut rng));
        }
        let target = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(mean.max_abs_diff(&target) < 0.05);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(4, &mut seeded_rng(3));
        let id = ComplexMatrix::identity(4);
        assert!(u.dagger().matmul(&u).max_abs_diff(&id) < 1e-12);
    }
}
