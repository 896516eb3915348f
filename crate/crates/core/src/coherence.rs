//! l1 norm of coherence in the computational basis, and the closed-form
//! coherence of tensor products.

use std::fmt;

use crate::tensor::{DMatrix, QuantumState};

/// A nonnegative l1-coherence value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Coherence(f64);

impl Coherence {
    pub const ZERO: Coherence = Coherence(0.0);

    /// `None` for negative or non-finite input.
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value >= 0.0).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Coherence> for f64 {
    fn from(c: Coherence) -> f64 {
        c.0
    }
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sum of the moduli of all off-diagonal entries.
pub fn l1_offdiagonal(m: &DMatrix) -> f64 {
    let n = m.side();
    let mut total = 0.0;
    for i in 0..n {
        for (j, z) in m.row(i).iter().enumerate() {
            if i != j {
                // Complex64::norm is hypot-based
                total += z.norm();
            }
        }
    }
    total
}

/// `C_l1(ρ) = Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(state: &QuantumState) -> Coherence {
    Coherence(l1_offdiagonal(state.matrix()))
}

/// Coherence of `ρ ⊗ σ` from the coherences of the factors:
/// `C(ρ) + C(σ) + C(ρ)·C(σ)`.
pub fn product_law(a: Coherence, b: Coherence) -> Coherence {
    Coherence(a.0 + b.0 + a.0 * b.0)
}

/// [`product_law`] folded over any number of factors, i.e. `∏(1 + c_i) − 1`.
/// An empty list gives zero.
pub fn product_law_n<I>(values: I) -> Coherence
where
    I: IntoIterator<Item = Coherence>,
{
    values.into_iter().fold(Coherence::ZERO, product_law)
}

/// `(x + y)² / 4`, the arithmetic-mean bound on `x·y`.
pub fn am_gm_bound(x: Coherence, y: Coherence) -> f64 {
    let s = x.0 + y.0;
    s * s / 4.0
}
