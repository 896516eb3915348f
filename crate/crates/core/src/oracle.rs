//! Brute-force verification of the closed-form coherence laws and of the
//! detectors' soundness on states built to satisfy their premises.
//!
//! Each trial draws from its own generator seeded with `seed + trial`, so a
//! failure can be replayed from the seed it records.

use rand::Rng;

use crate::coherence::{l1_coherence, product_law};
use crate::detectors::{check_product_equality, check_result3, check_result4, Cut, DetectError};
use crate::tensor::{DMatrix, QuantumState, SystemDims};
use crate::zoo::{random_bisep_ensemble_with, random_cut_product, random_sep_ensemble_with, random_state, random_weights, seeded_rng};

/// Tolerance for exact laws.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFailure {
    pub seed: u64,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub trials: usize,
    pub max_abs_error: f64,
    pub tol: f64,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    fn new(tol: f64) -> Self {
        Self { trials: 0, max_abs_error: 0.0, tol, failures: Vec::new() }
    }

    fn record(&mut self, seed: u64, error: f64, describe: impl FnOnce() -> String) {
        self.trials += 1;
        self.max_abs_error = self.max_abs_error.max(error);
        if !(error <= self.tol) {
            self.failures.push(OracleFailure { seed, description: describe() });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Merges two reports; order does not matter.
    pub fn merge(mut self, other: OracleReport) -> OracleReport {
        self.trials += other.trials;
        self.max_abs_error = self.max_abs_error.max(other.max_abs_error);
        self.tol = self.tol.max(other.tol);
        self.failures.extend(other.failures);
        self
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

// Kept separate from `coherence::l1_offdiagonal` so the two paths stay independent.
fn offdiagonal_modulus_sum(m: &DMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..m.side() {
        for j in 0..m.side() {
            if i != j {
                let z = m.get(i, j);
                total += z.re.hypot(z.im);
            }
        }
    }
    total
}

/// `|C(a ⊗ b) − product_law(C(a), C(b))|` with the left side summed over the
/// explicit Kronecker product.
pub fn product_law_deviation(a: &QuantumState, b: &QuantumState) -> f64 {
    let brute = offdiagonal_modulus_sum(&a.matrix().kron(b.matrix()));
    (brute - product_law(l1_coherence(a), l1_coherence(b)).value()).abs()
}

pub fn verify_product_law(trials: usize, dims_a: &SystemDims, dims_b: &SystemDims, tol: f64, seed: u64) -> OracleReport {
    let mut report = OracleReport::new(tol);
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let mut rng = seeded_rng(s);
        let a = random_state(dims_a, &mut rng);
        let b = random_state(dims_b, &mut rng);
        let err = product_law_deviation(&a, &b);
        report.record(s, err, || format!("product law off by {err:e} for {dims_a} x {dims_b}"));
    }
    report
}

/// `(C(Σ p_i ρ_i), Σ p_i C(ρ_i))`
pub fn convexity_sides(terms: &[(f64, &QuantumState)]) -> (f64, f64) {
    let mut mixed = DMatrix::zeros(terms[0].1.side());
    for &(p, s) in terms {
        mixed.add_scaled(p, s.matrix());
    }
    let lhs = offdiagonal_modulus_sum(&mixed);
    let rhs = terms.iter().map(|&(p, s)| p * offdiagonal_modulus_sum(s.matrix())).sum();
    (lhs, rhs)
}

pub fn verify_convexity(trials: usize, dims: &SystemDims, k: usize, tol: f64, seed: u64) -> OracleReport {
    let mut report = OracleReport::new(tol);
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let mut rng = seeded_rng(s);
        let states: Vec<QuantumState> = (0..k).map(|_| random_state(dims, &mut rng)).collect();
        let weights = random_weights(k, &mut rng);
        let terms: Vec<(f64, &QuantumState)> = weights.iter().copied().zip(&states).collect();
        let (lhs, rhs) = convexity_sides(&terms);
        let err = (lhs - rhs).max(0.0);
        report.record(s, err, || format!("mixture coherence {lhs} exceeds weighted sum {rhs}"));
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub product_equality: OracleReport,
    pub result3: OracleReport,
    pub result4: OracleReport,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.product_equality.passed() && self.result3.passed() && self.result4.passed()
    }

    pub fn combined(&self) -> OracleReport {
        self.product_equality.clone().merge(self.result3.clone()).merge(self.result4.clone())
    }
}

/// Up to 4 components per ensemble.
const MAX_COMPONENTS: usize = 4;

/// Random cut products, biseparable ensembles and separable ensembles must
/// never violate the checks whose premises they satisfy. The check decides
/// at `tol`; the reported error is the violation amount.
pub fn verify_detector_soundness(trials: usize, dims: &SystemDims, tol: f64, seed: u64) -> Result<SoundnessReport, DetectError> {
    let mut product_equality = OracleReport::new(tol);
    let mut result3 = OracleReport::new(tol);
    let mut result4 = OracleReport::new(tol);
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let mut rng = seeded_rng(s);

        let cut = Cut::new(rng.random_range(0..dims.parties()), dims.parties())?;
        let state = random_cut_product(dims, cut, &mut rng);
        let r = check_product_equality(&state, cut, tol)?;
        product_equality.record(s, (r.lhs - r.rhs).abs(), || format!("product equality failed on {cut}: {} vs {}", r.lhs, r.rhs));

        let k = rng.random_range(1..=MAX_COMPONENTS);
        let d = random_bisep_ensemble_with(dims, k, &mut rng);
        let r = check_result3(&d, tol)?;
        result3.record(s, (r.lhs - r.rhs).max(0.0), || format!("mixed-cut bound failed with {k} components: {} > {}", r.lhs, r.rhs));

        let k = rng.random_range(1..=MAX_COMPONENTS);
        let d = random_sep_ensemble_with(dims, k, &mut rng);
        let r = check_result4(&d, tol)?;
        result4.record(s, (r.lhs - r.rhs).max(0.0), || format!("separable bound failed with {k} components: {} > {}", r.lhs, r.rhs));
    }
    Ok(SoundnessReport { product_equality, result3, result4 })
}
