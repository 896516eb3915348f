//! l1-norm coherence of multipartite quantum states and the separability /
//! biseparability checks built on it.
//!
//! The l1 norm of coherence of a density matrix is the sum of the moduli of
//! its off-diagonal entries in the computational basis. For a tensor product
//! it obeys `C(ρ ⊗ σ) = C(ρ) + C(σ) + C(ρ)·C(σ)`; the [`detectors`] turn that
//! law and convexity into equalities and inequalities that every product,
//! biseparable or fully separable state must satisfy.
//!
//! Modules:
//! - [`tensor`]: dense states, Kronecker products, partial traces, mixtures.
//! - [`coherence`]: the coherence measure and the product law.
//! - [`detectors`]: individual checks and [`detectors::classify`].
//! - [`zoo`]: named example states and seeded random generators.
//! - [`oracle`]: brute-force verification suites.

pub mod coherence;
pub mod detectors;
pub mod oracle;
pub mod tensor;
pub mod zoo;

pub use coherence::{am_gm_bound, l1_coherence, product_law, product_law_n, Coherence};
pub use detectors::{
    check_full_separable_equality, check_product_equality, check_result2, check_result3, check_result3_reduced,
    check_result4, classify, CheckKind, ClassificationReport, Component, Cut, Decomposition, DetectError,
    InequalityRecord, Mode, Verdict, DETECTION_TOL,
};
pub use tensor::{DMatrix, Purity, QuantumState, StateError, SystemDims, Validation, ValidationReport, C64};
