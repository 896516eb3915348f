//! Dense complex matrices over multi-party Hilbert spaces.
//!
//! Subsystem 0 is the leftmost symbol of a ket string such as `|101⟩` and is
//! the slowest-varying digit of a flat basis index.

use std::fmt;

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity / trace / normalization tolerance.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted as positive semidefinite is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-8;
/// Largest matrix side the library accepts.
pub const MAX_SIDE: usize = 256;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),
    #[error("vector or matrix length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state vector not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("matrix not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace deviates from 1 by {deviation:e}")]
    TraceNotOne { deviation: f64 },
    #[error("matrix not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("keep set is empty")]
    EmptyKeepSet,
    #[error("subsystem index {index} out of range for {parties} parties")]
    IndexOutOfRange { index: usize, parties: usize },
    #[error("basis digit {digit} out of range for subsystem {party}")]
    DigitOutOfRange { digit: usize, party: usize },
    #[error("subsystem index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSumInvalid { sum: f64 },
    #[error("mixture weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("subsystem dimensions differ: {left} vs {right}")]
    DimsMismatch { left: SystemDims, right: SystemDims },
    #[error("mixture has no components")]
    EmptyMixture,
}

/// Local dimension of each subsystem, in ket-string order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemDims(Vec<usize>);

impl SystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self, StateError> {
        if dims.is_empty() {
            return Err(StateError::InvalidDims("no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(StateError::InvalidDims(format!("local dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_SIDE)
            .ok_or_else(|| StateError::InvalidDims(format!("total dimension exceeds {MAX_SIDE}")))?;
        debug_assert!(total >= 2);
        Ok(Self(dims))
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit register within size limit")
    }

    pub fn uniform(local: usize, parties: usize) -> Result<Self, StateError> {
        Self::new(vec![local; parties])
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn local(&self, party: usize) -> usize {
        self.0[party]
    }

    /// Dimensions of the listed subsystems, in the order given.
    pub fn select(&self, parties: &[usize]) -> SystemDims {
        SystemDims(parties.iter().map(|&p| self.0[p]).collect())
    }

    pub fn concat(&self, other: &SystemDims) -> Result<SystemDims, StateError> {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        SystemDims::new(dims)
    }

    /// Splits a flat basis index into per-subsystem digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Inverse of [`SystemDims::digits`].
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.0).fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

impl fmt::Display for SystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DMatrix {
    side: usize,
    entries: Vec<C64>,
}

impl DMatrix {
    pub fn zeros(side: usize) -> Self {
        Self { side, entries: vec![ZERO; side * side] }
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                entries.push(f(i, j));
            }
        }
        Self { side, entries }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self, StateError> {
        let side = (entries.len() as f64).sqrt().round() as usize;
        if side * side != entries.len() || side == 0 {
            return Err(StateError::LengthMismatch { expected: side * side, found: entries.len() });
        }
        Ok(Self { side, entries })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.side + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.entries[i * self.side + j] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.side..(i + 1) * self.side]
    }

    pub fn trace(&self) -> C64 {
        (0..self.side).map(|i| self.get(i, i)).sum()
    }

    pub fn kron(&self, other: &DMatrix) -> DMatrix {
        let n = other.side;
        DMatrix::from_fn(self.side * n, |i, j| self.get(i / n, j / n) * other.get(i % n, j % n))
    }

    pub fn scale(&self, factor: f64) -> DMatrix {
        DMatrix { side: self.side, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    /// `self += weight * other`
    pub fn add_scaled(&mut self, weight: f64, other: &DMatrix) {
        assert_eq!(self.side, other.side, "side mismatch in add_scaled");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * weight;
        }
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.side {
            for j in i..self.side {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DMatrix) -> f64 {
        assert_eq!(self.side, other.side, "side mismatch in max_abs_diff");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.side;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purity {
    Pure,
    Mixed,
    Unknown,
}

/// Which checks [`QuantumState::from_matrix`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation {
    pub tol: f64,
    pub psd_tol: f64,
    pub check_psd: bool,
}

impl Default for Validation {
    fn default() -> Self {
        Self { tol: HERMITIAN_TOL, psd_tol: PSD_TOL, check_psd: true }
    }
}

impl Validation {
    /// Hermiticity and trace only.
    pub fn without_psd() -> Self {
        Self { check_psd: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub psd_tol: f64,
}

impl ValidationReport {
    pub fn hermitian_ok(&self) -> bool {
        self.hermitian_deviation <= self.tol
    }

    pub fn trace_ok(&self) -> bool {
        self.trace_deviation <= self.tol
    }

    pub fn psd_ok(&self) -> bool {
        self.min_eigenvalue >= -self.psd_tol
    }

    pub fn is_valid(&self) -> bool {
        self.hermitian_ok() && self.trace_ok() && self.psd_ok()
    }
}

/// A density matrix tagged with its subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: DMatrix,
    dims: SystemDims,
    purity: Purity,
}

impl QuantumState {
    pub fn from_matrix(matrix: DMatrix, dims: SystemDims, validation: Validation) -> Result<Self, StateError> {
        if matrix.side() != dims.total() {
            return Err(StateError::LengthMismatch { expected: dims.total(), found: matrix.side() });
        }
        if !matrix.is_finite() {
            return Err(StateError::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > validation.tol {
            return Err(StateError::NotHermitian { deviation });
        }
        let deviation = (matrix.trace() - 1.0).norm();
        if deviation > validation.tol {
            return Err(StateError::TraceNotOne { deviation });
        }
        if validation.check_psd {
            let min_eigenvalue = matrix.hermitian_eigenvalues()[0];
            if min_eigenvalue < -validation.psd_tol {
                return Err(StateError::NotPositive { min_eigenvalue });
            }
        }
        Ok(Self { matrix, dims, purity: Purity::Unknown })
    }

    /// `|ψ⟩⟨ψ|` from amplitudes in computational-basis order.
    pub fn make_pure(amplitudes: &[C64], dims: SystemDims) -> Result<Self, StateError> {
        Self::make_pure_with_tol(amplitudes, dims, HERMITIAN_TOL)
    }

    pub fn make_pure_with_tol(amplitudes: &[C64], dims: SystemDims, tol: f64) -> Result<Self, StateError> {
        if amplitudes.len() != dims.total() {
            return Err(StateError::LengthMismatch { expected: dims.total(), found: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { matrix: DMatrix::outer(amplitudes), dims, purity: Purity::Pure })
    }

    /// Computational basis state; `digits` has one entry per subsystem.
    pub fn basis(digits: &[usize], dims: SystemDims) -> Result<Self, StateError> {
        if digits.len() != dims.parties() {
            return Err(StateError::LengthMismatch { expected: dims.parties(), found: digits.len() });
        }
        for (p, (&x, &d)) in digits.iter().zip(dims.as_slice()).enumerate() {
            if x >= d {
                return Err(StateError::DigitOutOfRange { digit: x, party: p });
            }
        }
        let mut amps = vec![ZERO; dims.total()];
        amps[dims.flat_index(digits)] = C64::new(1.0, 0.0);
        Self::make_pure(&amps, dims)
    }

    pub fn matrix(&self) -> &DMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SystemDims {
        &self.dims
    }

    pub fn purity_hint(&self) -> Purity {
        self.purity
    }

    pub fn side(&self) -> usize {
        self.matrix.side()
    }

    pub fn parties(&self) -> usize {
        self.dims.parties()
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// True when the hint says pure, or `tr ρ²` is 1 within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        match self.purity {
            Purity::Pure => true,
            _ => (1.0 - self.purity()).abs() <= tol,
        }
    }

    pub fn kron(&self, other: &QuantumState) -> QuantumState {
        let dims = self.dims.concat(&other.dims).expect("combined state exceeds supported size");
        let purity = match (self.purity, other.purity) {
            (Purity::Pure, Purity::Pure) => Purity::Pure,
            (Purity::Mixed, _) | (_, Purity::Mixed) => Purity::Mixed,
            _ => Purity::Unknown,
        };
        QuantumState { matrix: self.matrix.kron(&other.matrix), dims, purity }
    }

    /// Reduced state on `keep`; the result lists kept subsystems in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState, StateError> {
        if keep.is_empty() {
            return Err(StateError::EmptyKeepSet);
        }
        let parties = self.parties();
        let mut kept = vec![false; parties];
        for &k in keep {
            if k >= parties {
                return Err(StateError::IndexOutOfRange { index: k, parties });
            }
            if kept[k] {
                return Err(StateError::DuplicateIndex(k));
            }
            kept[k] = true;
        }
        let keep_sorted: Vec<usize> = (0..parties).filter(|&p| kept[p]).collect();
        if keep_sorted.len() == parties {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..parties).filter(|&p| !kept[p]).collect();
        let keep_dims = self.dims.select(&keep_sorted);
        let traced_dims = self.dims.select(&traced);

        let n = self.side();
        let mut kept_index = Vec::with_capacity(n);
        let mut traced_index = Vec::with_capacity(n);
        for i in 0..n {
            let digits = self.dims.digits(i);
            let k: Vec<usize> = keep_sorted.iter().map(|&p| digits[p]).collect();
            let t: Vec<usize> = traced.iter().map(|&p| digits[p]).collect();
            kept_index.push(keep_dims.flat_index(&k));
            traced_index.push(traced_dims.flat_index(&t));
        }

        let mut out = DMatrix::zeros(keep_dims.total());
        for i in 0..n {
            for j in 0..n {
                if traced_index[i] == traced_index[j] {
                    let (r, c) = (kept_index[i], kept_index[j]);
                    out.set(r, c, out.get(r, c) + self.matrix.get(i, j));
                }
            }
        }
        Ok(QuantumState { matrix: out, dims: keep_dims, purity: Purity::Unknown })
    }

    /// Reorders subsystems: subsystem `order[k]` of `self` becomes subsystem `k` of the result.
    pub fn permute(&self, order: &[usize]) -> Result<QuantumState, StateError> {
        let parties = self.parties();
        if order.len() != parties {
            return Err(StateError::LengthMismatch { expected: parties, found: order.len() });
        }
        let mut seen = vec![false; parties];
        for &p in order {
            if p >= parties {
                return Err(StateError::IndexOutOfRange { index: p, parties });
            }
            if seen[p] {
                return Err(StateError::DuplicateIndex(p));
            }
            seen[p] = true;
        }
        let new_dims = self.dims.select(order);
        let n = self.side();
        // position in the new layout for every old flat index
        let map: Vec<usize> = (0..n)
            .map(|i| {
                let digits = self.dims.digits(i);
                let permuted: Vec<usize> = order.iter().map(|&p| digits[p]).collect();
                new_dims.flat_index(&permuted)
            })
            .collect();
        let mut out = DMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(map[i], map[j], self.matrix.get(i, j));
            }
        }
        Ok(QuantumState { matrix: out, dims: new_dims, purity: self.purity })
    }

    /// Convex combination `Σ p_i ρ_i`.
    pub fn mix(components: &[(f64, &QuantumState)]) -> Result<QuantumState, StateError> {
        Self::mix_with_tol(components, HERMITIAN_TOL)
    }

    pub fn mix_with_tol(components: &[(f64, &QuantumState)], tol: f64) -> Result<QuantumState, StateError> {
        let (_, first) = components.first().ok_or(StateError::EmptyMixture)?;
        let mut sum = 0.0;
        for &(p, s) in components {
            if !(0.0..=1.0).contains(&p) {
                return Err(StateError::WeightOutOfRange(p));
            }
            if s.dims != first.dims {
                return Err(StateError::DimsMismatch { left: first.dims.clone(), right: s.dims.clone() });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tol {
            return Err(StateError::WeightSumInvalid { sum });
        }
        let mut matrix = DMatrix::zeros(first.side());
        for &(p, s) in components {
            matrix.add_scaled(p, &s.matrix);
        }
        Ok(QuantumState { matrix, dims: first.dims.clone(), purity: Purity::Mixed })
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_matrix(&self.matrix, tol)
    }
}

/// Reports Hermiticity deviation, trace deviation and the smallest eigenvalue.
pub fn validate_matrix(matrix: &DMatrix, tol: f64) -> ValidationReport {
    ValidationReport {
        hermitian_deviation: matrix.hermitian_deviation(),
        trace_deviation: (matrix.trace() - 1.0).norm(),
        min_eigenvalue: matrix.hermitian_eigenvalues()[0],
        tol,
        psd_tol: PSD_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ghz3() -> QuantumState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(h);
        amps[7] = c(h);
        QuantumState::make_pure(&amps, SystemDims::qubits(3)).unwrap()
    }

    #[test]
    fn dims_reject_bad_entries() {
        assert!(SystemDims::new(vec![]).is_err());
        assert!(SystemDims::new(vec![2, 1]).is_err());
        assert!(SystemDims::new(vec![2; 9]).is_err());
        assert_eq!(SystemDims::new(vec![3, 3, 3]).unwrap().total(), 27);
    }

    #[test]
    fn digits_round_trip() {
        let dims = SystemDims::new(vec![2, 3, 2]).unwrap();
        for i in 0..dims.total() {
            assert_eq!(dims.flat_index(&dims.digits(i)), i);
        }
        // |101⟩ is index 5 with subsystem 0 most significant
        assert_eq!(SystemDims::qubits(3).flat_index(&[1, 0, 1]), 5);
    }

    #[test]
    fn ghz_projector_has_four_halves() {
        let s = ghz3();
        let nonzero: Vec<_> = s.matrix().entries().iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|z| (z.re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn make_pure_basis_state() {
        let s = QuantumState::make_pure(&[c(1.0), c(0.0)], SystemDims::qubits(1)).unwrap();
        assert_eq!(s.matrix(), &DMatrix::from_diagonal(&[1.0, 0.0]));
        assert_eq!(s.purity_hint(), Purity::Pure);
    }

    #[test]
    fn make_pure_errors() {
        let err = QuantumState::make_pure(&[c(1.0)], SystemDims::qubits(1)).unwrap_err();
        assert!(matches!(err, StateError::LengthMismatch { expected: 2, found: 1 }));
        let err = QuantumState::make_pure(&[c(1.0), c(1.0)], SystemDims::qubits(1)).unwrap_err();
        assert!(matches!(err, StateError::NotNormalized { .. }));
    }

    #[test]
    fn w_state_matrix_entries() {
        let a = c(1.0 / 3f64.sqrt());
        let mut amps = vec![c(0.0); 8];
        for i in [4, 2, 1] {
            amps[i] = a;
        }
        let w = QuantumState::make_pure(&amps, SystemDims::qubits(3)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if [4, 2, 1].contains(&i) && [4, 2, 1].contains(&j) { 1.0 / 3.0 } else { 0.0 };
                assert_abs_diff_eq!(w.matrix().get(i, j).re, expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn kron_of_basis_projectors() {
        let q = SystemDims::qubits(1);
        let zero = QuantumState::basis(&[0], q.clone()).unwrap();
        let one = QuantumState::basis(&[1], q).unwrap();
        let p = zero.kron(&one);
        assert_eq!(p.matrix(), &DMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(p.dims().as_slice(), &[2, 2]);
    }

    #[test]
    fn kron_matches_explicit_two_qubit_layout() {
        // ρ1 = [[a1, b1], [b1*, d1]], ρ2 = [[a2, b2], [b2*, d2]]
        let (a1, d1, b1) = (0.7, 0.3, C64::new(0.2, -0.1));
        let (a2, d2, b2) = (0.4, 0.6, C64::new(-0.15, 0.3));
        let r1 = DMatrix::from_row_major(vec![c(a1), b1, b1.conj(), c(d1)]).unwrap();
        let r2 = DMatrix::from_row_major(vec![c(a2), b2, b2.conj(), c(d2)]).unwrap();
        let k = r1.kron(&r2);
        let expected = [
            [c(a1 * a2), b2 * a1, b1 * a2, b1 * b2],
            [b2.conj() * a1, c(a1 * d2), b1 * b2.conj(), b1 * d2],
            [b1.conj() * a2, b1.conj() * b2, c(d1 * a2), b2 * d1],
            [b1.conj() * b2.conj(), b1.conj() * d2, b2.conj() * d1, c(d1 * d2)],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((k.get(i, j) - e).norm() < 1e-15, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn partial_trace_of_w() {
        let a = c(1.0 / 3f64.sqrt());
        let mut amps = vec![c(0.0); 8];
        for i in [4, 2, 1] {
            amps[i] = a;
        }
        let w = QuantumState::make_pure(&amps, SystemDims::qubits(3)).unwrap();
        for keep in 0..3 {
            let r = w.partial_trace(&[keep]).unwrap();
            assert!(r.matrix().max_abs_diff(&DMatrix::from_diagonal(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_ghz_is_diagonal() {
        let (theta, delta) = (0.4f64, 1.1f64);
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(theta.cos());
        amps[7] = C64::from_polar(theta.sin(), delta);
        let s = QuantumState::make_pure(&amps, SystemDims::qubits(3)).unwrap();
        let bc = s.partial_trace(&[1, 2]).unwrap();
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        assert!(bc.matrix().max_abs_diff(&DMatrix::from_diagonal(&[c2, 0.0, 0.0, s2])) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let s = ghz3();
        assert_eq!(s.partial_trace(&[]).unwrap_err(), StateError::EmptyKeepSet);
        assert!(matches!(s.partial_trace(&[3]).unwrap_err(), StateError::IndexOutOfRange { index: 3, .. }));
        assert_eq!(s.partial_trace(&[1, 1]).unwrap_err(), StateError::DuplicateIndex(1));
    }

    #[test]
    fn partial_trace_keep_order_is_normalized() {
        let s = ghz3();
        assert_eq!(s.partial_trace(&[2, 0]).unwrap(), s.partial_trace(&[0, 2]).unwrap());
    }

    #[test]
    fn permute_moves_subsystems() {
        let dims = SystemDims::qubits(3);
        let s = QuantumState::basis(&[1, 0, 0], dims.clone()).unwrap();
        // new subsystem k = old subsystem order[k]
        let p = s.permute(&[1, 2, 0]).unwrap();
        assert_eq!(p, QuantumState::basis(&[0, 0, 1], dims).unwrap());
    }

    #[test]
    fn mix_of_basis_states() {
        let q = SystemDims::qubits(1);
        let zero = QuantumState::basis(&[0], q.clone()).unwrap();
        let one = QuantumState::basis(&[1], q).unwrap();
        let m = QuantumState::mix(&[(0.5, &zero), (0.5, &one)]).unwrap();
        assert_eq!(m.matrix(), &DMatrix::from_diagonal(&[0.5, 0.5]));
        assert_eq!(m.purity_hint(), Purity::Mixed);
        let err = QuantumState::mix(&[(0.3, &zero), (0.8, &one)]).unwrap_err();
        assert!(matches!(err, StateError::WeightSumInvalid { .. }));
    }

    #[test]
    fn mix_rejects_mismatched_dims() {
        let a = QuantumState::basis(&[0], SystemDims::qubits(1)).unwrap();
        let b = QuantumState::basis(&[0, 0], SystemDims::qubits(2)).unwrap();
        assert!(matches!(QuantumState::mix(&[(0.5, &a), (0.5, &b)]), Err(StateError::DimsMismatch { .. })));
        assert_eq!(QuantumState::mix(&[]).unwrap_err(), StateError::EmptyMixture);
    }

    #[test]
    fn validate_reports() {
        let s = ghz3();
        let report = s.validate(1e-9);
        assert!(report.is_valid());
        assert_abs_diff_eq!(report.min_eigenvalue, 0.0, epsilon = 1e-12);

        let low = DMatrix::from_diagonal(&[0.5, 0.4]);
        let report = validate_matrix(&low, 1e-9);
        assert_abs_diff_eq!(report.trace_deviation, 0.1, epsilon = 1e-15);
        assert!(!report.trace_ok());

        let mut skew = DMatrix::from_diagonal(&[0.5, 0.5]);
        skew.set(0, 1, c(1e-3));
        let report = validate_matrix(&skew, 1e-9);
        assert!(!report.hermitian_ok());
        assert_abs_diff_eq!(report.hermitian_deviation, 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn from_matrix_psd_is_optional() {
        let dims = SystemDims::qubits(1);
        let neg = DMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            QuantumState::from_matrix(neg.clone(), dims.clone(), Validation::default()),
            Err(StateError::NotPositive { .. })
        ));
        assert!(QuantumState::from_matrix(neg, dims, Validation::without_psd()).is_ok());
    }
}
