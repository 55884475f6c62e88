//! Explicit resolutions of depolarizing channels into mixtures of positive
//! maps followed by one-sided entanglement-breaking depolarization.
//!
//! A verified [`Resolution`] is a constructive EA certificate: each term is
//! (Φ_p ⊗ Id) ∘ Λ_{s,t} or (Id ⊗ Φ_p) ∘ Λ_{s,t} with Φ_p inside the EB
//! range of its side and Λ_{s,t} inside the analytic positivity region, and
//! the weighted terms rebuild the target Choi matrix to 1e-10.
//!
//! All transfer matrices involved are diagonal in the product Gell-Mann
//! basis, with three entry classes: (0,0), one index zero, both nonzero.
//! Matching the three classes gives the parameter equations solved here.

use serde::{Deserialize, Serialize};

use super::eq5_region;
use crate::channel_core::{
    compose, depolarizing, depolarizing_eb_range, depolarizing_global, depolarizing_product,
    lambda_st, mix, tensor, Channel, Dims, LambdaSt,
};
use crate::error::{EaError, Result};
use crate::tensor_linalg::{DimPair, Subsystem};

/// One term of a resolution: weight * (one-sided EB Φ_p) ∘ Λ_{s,t}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionTerm {
    pub weight: f64,
    pub lambda: LambdaSt,
    /// Depolarizing parameter of the one-sided EB operation.
    pub eb_q: f64,
    /// Which subsystem the EB operation acts on.
    pub eb_side: Subsystem,
}

/// A convex decomposition certifying the EA property of `target`.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub dims: DimPair,
    pub terms: Vec<ResolutionTerm>,
    pub target: Channel,
}

impl Resolution {
    /// The channel (Φ_p ⊗ Id) ∘ Λ_{s,t} (or the B-sided variant) of a term.
    pub fn term_channel(&self, term: &ResolutionTerm) -> Result<Channel> {
        let lam = lambda_st(term.lambda);
        let one_sided = match term.eb_side {
            Subsystem::A => tensor(
                &depolarizing(self.dims.a, term.eb_q)?,
                &Channel::identity(Dims::single(self.dims.b)),
            )?,
            Subsystem::B => tensor(
                &Channel::identity(Dims::single(self.dims.a)),
                &depolarizing(self.dims.b, term.eb_q)?,
            )?,
        };
        compose(&one_sided, &lam)
    }

    /// The weighted mixture of all terms.
    pub fn as_channel(&self) -> Result<Channel> {
        let channels: Vec<Channel> = self
            .terms
            .iter()
            .map(|t| self.term_channel(t))
            .collect::<Result<_>>()?;
        let refs: Vec<&Channel> = channels.iter().collect();
        let weights: Vec<f64> = self.terms.iter().map(|t| t.weight).collect();
        mix(&weights, &refs)
    }

    /// Max-abs Choi distance between the mixture and the target.
    pub fn reconstruction_residual(&self) -> Result<f64> {
        Ok(self.as_channel()?.choi().max_abs_diff(self.target.choi()))
    }

    /// Check every certificate obligation: weight normalization, positivity
    /// of each Λ_{s,t}, the EB range of each Φ_p, and Choi reconstruction.
    pub fn verify(&self, tol: f64) -> Result<()> {
        let sum: f64 = self.terms.iter().map(|t| t.weight).sum();
        if (sum - 1.0).abs() > 1e-12 || self.terms.iter().any(|t| t.weight < -1e-12) {
            return Err(EaError::Infeasible {
                constraint: "weights",
                detail: format!("sum = {sum}"),
            });
        }
        for term in &self.terms {
            if !term.lambda.is_certified_positive() {
                return Err(EaError::Infeasible {
                    constraint: "lambda positivity",
                    detail: format!(
                        "s = {}, t = {} violates 0 <= s <= t <= {}",
                        term.lambda.s,
                        term.lambda.t,
                        term.lambda.positivity_bound()
                    ),
                });
            }
            let side_dim = match term.eb_side {
                Subsystem::A => self.dims.a,
                Subsystem::B => self.dims.b,
            };
            let (lo, hi) = depolarizing_eb_range(side_dim);
            if term.eb_q < lo - 1e-12 || term.eb_q > hi + 1e-12 {
                return Err(EaError::Infeasible {
                    constraint: "EB range",
                    detail: format!("p = {} outside [{lo}, {hi}]", term.eb_q),
                });
            }
        }
        let residual = self.reconstruction_residual()?;
        if residual > tol {
            return Err(EaError::Infeasible {
                constraint: "reconstruction",
                detail: format!("residual = {residual:.3e} > {tol:.1e}"),
            });
        }
        Ok(())
    }

    /// Short human-readable summary for certificates.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let side = match t.eb_side {
                    Subsystem::A => "A",
                    Subsystem::B => "B",
                };
                format!(
                    "{:.6}*(Phi_{:.6} on {side})∘Lambda({:.6},{:.6})",
                    t.weight, t.eb_q, t.lambda.s, t.lambda.t
                )
            })
            .collect();
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Local d x d resolutions.
// ---------------------------------------------------------------------------

/// Appendix-C-style maximal t for a given s at dimension d.
fn t_of_s(d: usize, s: f64) -> f64 {
    let df = d.max(2) as f64;
    (1.0 + (df - 2.0) * s) / (df - 1.0)
}

/// Solve the two off-diagonal matching equations for (s1, s2) given the
/// weights and EB parameters:
///     mu * s1 + (1-mu) * p2 * s2 = c_b
///     mu * p1 * s1 + (1-mu) * s2 = c_a
fn solve_s_pair(mu: f64, p1: f64, p2: f64, c_b: f64, c_a: f64) -> Option<(f64, f64)> {
    let det = mu * (1.0 - mu) * (1.0 - p1 * p2);
    if det.abs() < 1e-14 {
        return None;
    }
    let s1 = ((1.0 - mu) * c_b - (1.0 - mu) * p2 * c_a) / det;
    let s2 = (mu * c_a - mu * p1 * c_b) / det;
    Some((s1, s2))
}

/// Two-term resolution of Φ_{q1} ⊗ Φ_{q2} on a d x d system inside the
/// sufficient region. On the region boundary the closed forms with
/// p = 1/(d+1) apply; inside, the matching system is solved numerically.
pub fn local_resolution(d: usize, q1: f64, q2: f64) -> Result<Resolution> {
    if d < 2 {
        return Err(EaError::UnsupportedDims {
            detail: format!("local resolution needs d >= 2, got {d}"),
        });
    }
    let dims = DimPair::new(d, d);
    let target = depolarizing_product(dims, q1, q2)?;
    if !eq5_region(d, q1, q2) {
        return Err(EaError::Infeasible {
            constraint: "eq5 region",
            detail: format!("(d^2-1) q1 q2 exceeds the sufficient bound at q1={q1}, q2={q2}"),
        });
    }

    let df = d as f64;
    let chi = (df - 2.0) * (df + 1.0) / (df + 2.0);
    let on_boundary =
        ((df * df - 1.0) * q1 * q2 - 1.0 - chi * (q1 + q2)).abs() <= 1e-9;

    if on_boundary {
        if let Some(res) = boundary_closed_form(d, q1, q2, &target) {
            if res.verify(1e-10).is_ok() {
                return Ok(res);
            }
        }
    }

    // Interior: the paper's weight first, then a deterministic weight grid.
    let mu_paper = 0.5 + (df + 1.0) / (2.0 * df) * (q2 - q1);
    let mut mu_candidates = vec![mu_paper];
    for i in 1..64 {
        mu_candidates.push(i as f64 / 64.0);
    }
    for mu in mu_candidates {
        if !(1e-9..=1.0 - 1e-9).contains(&mu) {
            continue;
        }
        if let Some(res) = interior_solve(d, q1, q2, mu, &target) {
            if res.verify(1e-10).is_ok() {
                return Ok(res);
            }
        }
    }
    Err(EaError::Infeasible {
        constraint: "matching system",
        detail: format!("no feasible (p, s1, s2) found at d={d}, q1={q1}, q2={q2}"),
    })
}

/// Paper closed forms on the boundary, with p = 1/(d+1).
fn boundary_closed_form(d: usize, q1: f64, q2: f64, target: &Channel) -> Option<Resolution> {
    let df = d as f64;
    let p = 1.0 / (df + 1.0);
    let mu = 0.5 + (df + 1.0) / (2.0 * df) * (q2 - q1);
    if !(0.0..=1.0).contains(&mu) {
        return None;
    }
    let den1 = df + (df + 1.0) * (q2 - q1);
    let den2 = df + (df + 1.0) * (q1 - q2);
    if den1.abs() < 1e-9 || den2.abs() < 1e-9 {
        return None;
    }
    let pref = 2.0 * (df + 1.0) / (df + 2.0);
    let s1 = pref * ((df + 1.0) * q2 - q1) / den1;
    let s2 = pref * ((df + 1.0) * q1 - q2) / den2;
    Some(two_term_resolution(d, mu, p, p, s1, t_of_s(d, s1), s2, t_of_s(d, s2), target))
}

/// Given the weight, bisect the EB parameter p so that the doubly-nonzero
/// class matches, with (s1, s2) from the linear off-diagonal equations.
fn interior_solve(d: usize, q1: f64, q2: f64, mu: f64, target: &Channel) -> Option<Resolution> {
    let (eb_lo, eb_hi) = depolarizing_eb_range(d);
    let residual = |p: f64| -> Option<f64> {
        let (s1, s2) = solve_s_pair(mu, p, p, q2, q1)?;
        let (t1, t2) = (t_of_s(d, s1), t_of_s(d, s2));
        Some(p * (mu * t1 + (1.0 - mu) * t2) - q1 * q2)
    };
    // Bracket a sign change over the EB range.
    let n = 64;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for i in 0..=n {
        let p = eb_lo + (eb_hi - eb_lo) * i as f64 / n as f64;
        let Some(r) = residual(p) else {
            prev = None;
            continue;
        };
        if r == 0.0 {
            bracket = Some((p, p));
            break;
        }
        if let Some((pp, rp)) = prev {
            if rp.signum() != r.signum() {
                bracket = Some((pp, p));
                break;
            }
        }
        prev = Some((p, r));
    }
    let (mut lo, mut hi) = bracket?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let rl = residual(lo)?;
        let rm = residual(mid)?;
        if rm == 0.0 || (hi - lo) < 1e-15 {
            lo = mid;
            break;
        }
        if rl.signum() == rm.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let (s1, s2) = solve_s_pair(mu, p, p, q2, q1)?;
    Some(two_term_resolution(
        d,
        mu,
        p,
        p,
        s1,
        t_of_s(d, s1),
        s2,
        t_of_s(d, s2),
        target,
    ))
}

#[allow(clippy::too_many_arguments)]
fn two_term_resolution(
    d: usize,
    mu: f64,
    p1: f64,
    p2: f64,
    s1: f64,
    t1: f64,
    s2: f64,
    t2: f64,
    target: &Channel,
) -> Resolution {
    let dims = target
        .dims_in()
        .as_pair()
        .unwrap_or_else(|| DimPair::new(d, d));
    Resolution {
        dims,
        terms: vec![
            ResolutionTerm {
                weight: mu,
                lambda: LambdaSt::new(dims, s1, t1),
                eb_q: p1,
                eb_side: Subsystem::A,
            },
            ResolutionTerm {
                weight: 1.0 - mu,
                lambda: LambdaSt::new(dims, s2, t2),
                eb_q: p2,
                eb_side: Subsystem::B,
            },
        ],
        target: target.clone(),
    }
}

// ---------------------------------------------------------------------------
// Global d x d resolution.
// ---------------------------------------------------------------------------

/// Resolution of the global depolarizing channel Φ_q^{AB} on a d x d system:
/// (1/2)(Φ_p ⊗ Id + Id ⊗ Φ_p) ∘ Λ_{s,t} with p = 1/(d+1),
/// s = 2(d+1)q/(d+2) and t = (d+1)q = (d+2)s/2.
///
/// The diagonal matching identities are s(1+p)/2 = q and t p = q; at
/// q = q_EA^global these give s = 2/(d^2-d+2) and saturate the positivity
/// bound exactly. Feasible iff 0 <= q <= q_EA^global.
pub fn global_resolution(d: usize, q: f64) -> Result<Resolution> {
    if d < 2 {
        return Err(EaError::UnsupportedDims {
            detail: format!("global resolution needs d >= 2, got {d}"),
        });
    }
    let dims = DimPair::new(d, d);
    let target = depolarizing_global(dims, q)?;
    let df = d as f64;
    let q_max = (df + 2.0) / ((df + 1.0) * (df * df - df + 2.0));
    if q > q_max + 1e-12 {
        return Err(EaError::Infeasible {
            constraint: "q <= q_EA^global",
            detail: format!("q = {q} > {q_max}"),
        });
    }
    if q < -1e-12 {
        return Err(EaError::Infeasible {
            constraint: "s >= 0",
            detail: format!("negative q = {q} gives a negative Lambda parameter"),
        });
    }
    let p = 1.0 / (df + 1.0);
    let s = 2.0 * (df + 1.0) * q / (df + 2.0);
    let t = (df + 1.0) * q;
    let lam = LambdaSt::new(dims, s, t);
    let res = Resolution {
        dims,
        terms: vec![
            ResolutionTerm {
                weight: 0.5,
                lambda: lam,
                eb_q: p,
                eb_side: Subsystem::A,
            },
            ResolutionTerm {
                weight: 0.5,
                lambda: lam,
                eb_q: p,
                eb_side: Subsystem::B,
            },
        ],
        target,
    };
    res.verify(1e-10)?;
    Ok(res)
}

// ---------------------------------------------------------------------------
// Qutrit-qubit (3 x 2) numerical searches.
// ---------------------------------------------------------------------------

/// Transfer-class targets of a diagonal bipartite channel on 3x2:
/// c_b for the (0, k!=0) class, c_a for (j!=0, 0), c_ab for both nonzero.
#[derive(Debug, Clone, Copy)]
struct ClassTargets {
    c_b: f64,
    c_a: f64,
    c_ab: f64,
}

const P1_MAX: f64 = 0.25; // EB bound of the qutrit side
const P2_MAX: f64 = 1.0 / 3.0; // EB bound of the qubit side

/// Deterministic feasibility search over the two-term ansatz on 3x2.
///
/// Degenerate single-term branches are solved in closed form; the general
/// case scans a grid over the EB parameters and the t-interpolation and
/// root-finds the weight on the doubly-nonzero class.
fn search_3x2(targets: ClassTargets, target: &Channel) -> Option<Resolution> {
    let dims = DimPair::new(3, 2);
    let make = |mu: f64, p1: f64, p2: f64, s1: f64, t1: f64, s2: f64, t2: f64| -> Resolution {
        Resolution {
            dims,
            terms: vec![
                ResolutionTerm {
                    weight: mu,
                    lambda: LambdaSt::new(dims, s1, t1),
                    eb_q: p1,
                    eb_side: Subsystem::A,
                },
                ResolutionTerm {
                    weight: 1.0 - mu,
                    lambda: LambdaSt::new(dims, s2, t2),
                    eb_q: p2,
                    eb_side: Subsystem::B,
                },
            ],
            target: target.clone(),
        }
    };
    let lambda_ok =
        |s: f64, t: f64| s >= -1e-12 && s <= t + 1e-12 && t <= 0.5 + 0.5 * s + 1e-12;

    let ClassTargets { c_b, c_a, c_ab } = targets;

    // mu = 1 branch: s1 = c_b, p1 = c_a/c_b, t1 = c_ab/p1.
    if c_b.abs() > 1e-15 {
        let s1 = c_b;
        let p1 = c_a / c_b;
        if p1.abs() > 1e-15 {
            let t1 = c_ab / p1;
            if (-0.125 - 1e-12..=P1_MAX + 1e-12).contains(&p1) && lambda_ok(s1, t1) {
                let res = make(1.0, p1, 0.0, s1, t1, 0.0, 0.5);
                if res.verify(1e-10).is_ok() {
                    return Some(res);
                }
            }
        }
    }
    // mu = 0 branch: s2 = c_a, p2 = c_b/c_a, t2 = c_ab/p2.
    if c_a.abs() > 1e-15 {
        let s2 = c_a;
        let p2 = c_b / c_a;
        let t2 = if p2.abs() > 1e-15 { c_ab / p2 } else { 0.5 + 0.5 * s2 };
        let consistent = p2.abs() > 1e-15 || c_ab.abs() <= 1e-15;
        if consistent && (-1.0 / 3.0 - 1e-12..=P2_MAX + 1e-12).contains(&p2) && lambda_ok(s2, t2)
        {
            let res = make(0.0, 0.0, p2, 0.0, 0.5, s2, t2);
            if res.verify(1e-10).is_ok() {
                return Some(res);
            }
        }
    }

    // General two-term search.
    let np = 26;
    let taus = [0.0, 0.5, 1.0];
    for i1 in 0..=np {
        let p1 = P1_MAX * i1 as f64 / np as f64;
        for i2 in 0..=np {
            let p2 = P2_MAX * i2 as f64 / np as f64;
            for &tau1 in &taus {
                for &tau2 in &taus {
                    let h = |mu: f64| -> Option<f64> {
                        let (s1, s2) = solve_s_pair(mu, p1, p2, c_b, c_a)?;
                        if !(-1e-12..=1.0 + 1e-12).contains(&s1)
                            || !(-1e-12..=1.0 + 1e-12).contains(&s2)
                        {
                            return None;
                        }
                        Some(
                            mu * p1 * t_of_tau(s1, tau1)
                                + (1.0 - mu) * p2 * t_of_tau(s2, tau2)
                                - c_ab,
                        )
                    };
                    if let Some(mu) = root_in_mu(&h) {
                        if let Some((s1, s2)) = solve_s_pair(mu, p1, p2, c_b, c_a) {
                            let res = make(
                                mu,
                                p1,
                                p2,
                                s1,
                                t_of_tau(s1, tau1),
                                s2,
                                t_of_tau(s2, tau2),
                            );
                            if res.verify(1e-10).is_ok() {
                                return Some(res);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Interpolate t between its minimum (s) and the positivity bound.
fn t_of_tau(s: f64, tau: f64) -> f64 {
    s + tau * (0.5 + 0.5 * s - s)
}

/// Scan the weight for a sign change of `h`, then bisect.
fn root_in_mu(h: &impl Fn(f64) -> Option<f64>) -> Option<f64> {
    let n = 128;
    let eval = |i: usize| -> (f64, Option<f64>) {
        let mu = 1e-6 + (1.0 - 2e-6) * i as f64 / n as f64;
        (mu, h(mu))
    };
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let (mu, val) = eval(i);
        let Some(v) = val else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            return Some(mu);
        }
        if let Some((pm, pv)) = prev {
            if pv.signum() != v.signum() {
                let (mut lo, mut hi, mut flo) = (pm, mu, pv);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = h(mid)?;
                    if fm == 0.0 {
                        return Some(mid);
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
        }
        prev = Some((mu, v));
    }
    None
}

/// Verified resolution of Φ_{q1}^{(3)} ⊗ Φ_{q2}^{(2)}, or `None` when the
/// search finds nothing (the certified region is slightly smaller than the
/// exact region q1(9 q2 - 1) <= 2).
pub fn local_resolution_3x2(q1: f64, q2: f64) -> Result<Option<Resolution>> {
    let dims = DimPair::new(3, 2);
    let target = depolarizing_product(dims, q1, q2)?;
    Ok(search_3x2(
        ClassTargets {
            c_b: q2,
            c_a: q1,
            c_ab: q1 * q2,
        },
        &target,
    ))
}

/// Verified resolution of the global Φ_q on a qutrit-qubit system.
pub fn global_resolution_3x2(q: f64) -> Result<Option<Resolution>> {
    let dims = DimPair::new(3, 2);
    let target = depolarizing_global(dims, q)?;
    Ok(search_3x2(
        ClassTargets {
            c_b: q,
            c_a: q,
            c_ab: q,
        },
        &target,
    ))
}

/// Supremum of the certified global 3x2 noise level, located by bisection
/// with 1e-3 resolution. The exact EA bound is 1/4; the two-term ansatz
/// certifies slightly less.
pub fn max_certified_q_3x2() -> Result<f64> {
    let feasible = |q: f64| -> Result<bool> { Ok(global_resolution_3x2(q)?.is_some()) };
    let mut lo = 0.0;
    let mut hi = 0.25;
    if !feasible(lo)? {
        return Err(EaError::Infeasible {
            constraint: "feasibility at q = 0",
            detail: "the trivial point should always be certifiable".into(),
        });
    }
    if feasible(hi)? {
        return Ok(hi);
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
