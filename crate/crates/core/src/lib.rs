//! # tsallis-core
//!
//! Tsallis-q entropies and the entanglement quantities built on them.
//!
//! The crate is organized bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`qstate`] | dense density matrices, partial trace, purification, spectral and Schmidt decompositions, Haar sampling |
//! | [`entropy`] | q-logarithm, Tsallis/Rényi/von Neumann entropies, relative entropy, Holevo quantity, Tsallis-q difference and mutual entropy |
//! | [`ccq`] | generalized Pauli operators, dephasing channels, the four-party classical-classical-quantum state and its closed-form mutual entropies |
//! | [`roof`] | convex and concave roofs (Tsallis-q entanglement, its assistance dual, Rényi entanglement, tangle) and one-way unlocalizable q-entanglement |
//! | [`lab`] | monogamy and polygamy checks with three-valued verdicts, random scans |
//!
//! All logarithms are natural. Entropic parameters with `|q - 1| < 1e-9`
//! switch to the von Neumann / Shannon limit formulas.
//!
//! Roof quantities are computed by multi-start local search over pure-state
//! decompositions, so they are one-sided: a convex roof result is an upper
//! bound on the true minimum, a concave roof result a lower bound on the true
//! maximum. The checks in [`lab`] only claim what those bounds support.

#![forbid(unsafe_code)]

pub mod ccq;
pub mod entropy;
pub mod error;
pub mod lab;
pub mod qstate;
pub mod roof;
pub mod seed;

pub use error::{Error, Result};
pub use qstate::{
    Bipartition, DensityMatrix, Dims, EigenDecomposition, Probabilities, PureState, StateRecord,
    C64, CMatrix, CVector,
};
pub use entropy::{EntropicParameter, Ensemble};
pub use roof::{BoundDirection, OptimizerBudget, PureFunctional, RoofResult};
pub use lab::{CheckKind, InequalityVerdict, ScanConfig, ScanReport, Verdict};

/// Crate version, echoed into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
