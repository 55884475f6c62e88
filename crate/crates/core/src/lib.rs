//! Finite-dimensional quantum channels and entanglement-annihilation analysis.
//!
//! The crate is organized in layers:
//!
//! * [`tensor_linalg`] — dense complex linear algebra with bipartite tensor
//!   structure (Kronecker products, partial trace/transpose, a Hermitian
//!   Jacobi eigensolver, operator bases, seeded sampling);
//! * [`channel_core`] — the [`Channel`] data model with interconvertible
//!   Kraus / Choi / transfer-matrix representations and constructors for
//!   depolarizing maps, the two-parameter diagonal maps Λ_{s,t} and one-sided
//!   entanglement-breaking operations;
//! * [`depolarizing_ea`] — closed-form regions, thresholds, explicit
//!   resolutions and robustness curves for local and global depolarizing
//!   noise;
//! * [`criteria`] — three-valued classification predicates (CP, TP, unital,
//!   EB, positivity, PEA, EA) with replayable certificates;
//! * [`qubit_unital`] — the closed-form classification of 2-locally unital
//!   qubit maps.

pub mod channel_core;
pub mod criteria;
pub mod depolarizing_ea;
pub mod error;
pub mod qubit_unital;
pub mod tensor_linalg;

pub use channel_core::{Channel, ChannelKind, Dims, EbOperation, LambdaSt};
pub use criteria::{Classification, Criterion, Status};
pub use error::{EaError, Result};
pub use tensor_linalg::{Complex64, ComplexMatrix, DimPair, Subsystem};

/// Default tolerance for spectral / classification decisions.
///
/// Overridable at the CLI through the `EA_ATLAS_TOL` environment variable.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance for structural identities (Hermiticity, trace checks).
pub const STRUCT_TOL: f64 = 1e-12;
