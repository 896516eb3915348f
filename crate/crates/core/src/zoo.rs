//! Named example states and seeded random generators.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use thiserror::Error;

use crate::detectors::{Component, Cut, DetectError, Decomposition};
use crate::tensor::{QuantumState, StateError, SystemDims, C64, HERMITIAN_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("amplitudes not normalized: sum of squares {0}")]
    NotNormalized(f64),
    #[error("a0² + a1² = {0}, expected 1/2")]
    NormalizationViolated(f64),
    #[error("mixing weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    State(#[from] StateError),
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn from_terms(dims: SystemDims, terms: &[(&[usize], C64)]) -> QuantumState {
    let mut amps = vec![C64::new(0.0, 0.0); dims.total()];
    for (digits, a) in terms {
        amps[dims.flat_index(digits)] += a;
    }
    QuantumState::make_pure(&amps, dims).expect("named state is normalized")
}

fn check_weight(q: f64) -> Result<(), ZooError> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(ZooError::WeightOutOfRange(q))
    }
}

/// `λ0|101⟩ + λ1|110⟩ + λ2|111⟩`, biseparable across A-BC.
pub fn bisep_pure_state(l0: f64, l1: f64, l2: f64) -> Result<QuantumState, ZooError> {
    let norm = l0 * l0 + l1 * l1 + l2 * l2;
    if (norm - 1.0).abs() > HERMITIAN_TOL {
        return Err(ZooError::NotNormalized(norm));
    }
    Ok(from_terms(
        SystemDims::qubits(3),
        &[(&[1, 0, 1], re(l0)), (&[1, 1, 0], re(l1)), (&[1, 1, 1], re(l2))],
    ))
}

/// `(|100⟩ + |010⟩ + |001⟩)/√3`
pub fn w_state() -> QuantumState {
    let a = re(1.0 / 3f64.sqrt());
    from_terms(SystemDims::qubits(3), &[(&[1, 0, 0], a), (&[0, 1, 0], a), (&[0, 0, 1], a)])
}

/// `cos θ|000⟩ + e^{iδ} sin θ|111⟩`
pub fn ghz_state(theta: f64, delta: f64) -> QuantumState {
    from_terms(
        SystemDims::qubits(3),
        &[(&[0, 0, 0], re(theta.cos())), (&[1, 1, 1], C64::from_polar(theta.sin(), delta))],
    )
}

/// `a0|000⟩ + a1|100⟩ + |111⟩/√2` with `a0² + a1² = 1/2`.
pub fn superposition_state(a0: f64, a1: f64) -> Result<QuantumState, ZooError> {
    let norm = a0 * a0 + a1 * a1;
    if (norm - 0.5).abs() > HERMITIAN_TOL || a0 < 0.0 || a1 < 0.0 {
        return Err(ZooError::NormalizationViolated(norm));
    }
    Ok(from_terms(
        SystemDims::qubits(3),
        &[(&[0, 0, 0], re(a0)), (&[1, 0, 0], re(a1)), (&[1, 1, 1], re(FRAC_1_SQRT_2))],
    ))
}

/// `a1` fixed by `a0` on the normalization circle, clamped at the endpoint.
pub fn superposition_a1(a0: f64) -> f64 {
    (0.5 - a0 * a0).max(0.0).sqrt()
}

/// `(|00⟩ ± |11⟩)/√2`
pub fn bell_phi(sign: f64) -> QuantumState {
    let h = FRAC_1_SQRT_2;
    from_terms(SystemDims::qubits(2), &[(&[0, 0], re(h)), (&[1, 1], re(sign * h))])
}

fn qubit(bit: usize) -> QuantumState {
    QuantumState::basis(&[bit], SystemDims::qubits(1)).expect("qubit basis state")
}

/// `q |0⟩⟨0|_A ⊗ Φ⁺_BC + (1−q) |1⟩⟨1|_B ⊗ Φ⁻_AC`, components tagged A-BC and B-AC.
pub fn bell_mixture(q: f64) -> Result<Decomposition, ZooError> {
    check_weight(q)?;
    let a = Component::cut_product(q, &qubit(0), &bell_phi(1.0), Cut::new(0, 3)?)?;
    let b = Component::cut_product(1.0 - q, &qubit(1), &bell_phi(-1.0), Cut::new(1, 3)?)?;
    Ok(Decomposition::new(vec![a, b])?)
}

/// `q |GHZ⟩⟨GHZ| + (1−q) |W⟩⟨W|`, compared against the biseparable form
/// with `p1 = q` on A-BC and `p2 = 1−q` on B-AC. Neither component is a
/// product across its cut.
pub fn ghz_w_mixture(q: f64) -> Result<Decomposition, ZooError> {
    check_weight(q)?;
    Ok(Decomposition::new(vec![
        Component::new(q, ghz_state(std::f64::consts::FRAC_PI_4, 0.0), Cut::new(0, 3)?),
        Component::new(1.0 - q, w_state(), Cut::new(1, 3)?),
    ])?)
}

/// `½ |0⟩⟨0|_A ⊗ φ⁺_BCD + ½ |1⟩⟨1|_B ⊗ φ⁻_ACD`, `φ± = (|100⟩ ± |010⟩)/√2`.
pub fn four_qubit_biseparable() -> Decomposition {
    let h = FRAC_1_SQRT_2;
    let phi = |sign: f64| from_terms(SystemDims::qubits(3), &[(&[1, 0, 0], re(h)), (&[0, 1, 0], re(sign * h))]);
    let a = Component::cut_product(0.5, &qubit(0), &phi(1.0), cut(0, 4)).expect("valid layout");
    let b = Component::cut_product(0.5, &qubit(1), &phi(-1.0), cut(1, 4)).expect("valid layout");
    Decomposition::new(vec![a, b]).expect("valid weights")
}

/// Equal mixture of `|0000⟩, |0011⟩, |1000⟩, |1111⟩` as product components.
pub fn four_qubit_separable() -> Decomposition {
    let components = [[0, 0, 0, 0], [0, 0, 1, 1], [1, 0, 0, 0], [1, 1, 1, 1]]
        .iter()
        .map(|bits| Component::product(0.25, bits.iter().map(|&b| qubit(b)).collect()).expect("single-party factors"))
        .collect();
    Decomposition::new(components).expect("valid weights")
}

/// `|0⟩ ⊗ (|12⟩ + |01⟩ + |20⟩)/√3` on three qutrits, tagged A-BC.
pub fn qutrit_biseparable() -> Decomposition {
    let a = re(1.0 / 3f64.sqrt());
    let rest = from_terms(SystemDims::uniform(3, 2).expect("two qutrits"), &[(&[1, 2], a), (&[0, 1], a), (&[2, 0], a)]);
    let solo = QuantumState::basis(&[0], SystemDims::new(vec![3]).expect("qutrit")).expect("basis");
    Decomposition::new(vec![Component::cut_product(1.0, &solo, &rest, cut(0, 3)).expect("valid layout")])
        .expect("valid weights")
}

fn cut(solo: usize, parties: usize) -> Cut {
    Cut::new(solo, parties).expect("cut within range")
}

#[derive(Debug, Clone)]
pub struct ExtendedStates {
    pub four_qubit_biseparable: Decomposition,
    pub four_qubit_separable: Decomposition,
    pub qutrit_biseparable: Decomposition,
}

pub fn extended_states() -> ExtendedStates {
    ExtendedStates {
        four_qubit_biseparable: four_qubit_biseparable(),
        four_qubit_separable: four_qubit_separable(),
        qutrit_biseparable: qutrit_biseparable(),
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized complex-normal vector: a Haar-random pure state.
pub fn random_amplitudes<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn random_pure<R: Rng + ?Sized>(dims: &SystemDims, rng: &mut R) -> QuantumState {
    QuantumState::make_pure(&random_amplitudes(dims.total(), rng), dims.clone()).expect("normalized sample")
}

/// Uniform point on the probability simplex.
pub fn random_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Mixture of `rank` random pure states with simplex weights.
pub fn random_mixed<R: Rng + ?Sized>(dims: &SystemDims, rank: usize, rng: &mut R) -> QuantumState {
    let states: Vec<QuantumState> = (0..rank).map(|_| random_pure(dims, rng)).collect();
    let weights = random_weights(rank, rng);
    let terms: Vec<(f64, &QuantumState)> = weights.iter().copied().zip(&states).collect();
    QuantumState::mix(&terms).expect("simplex weights")
}

/// Pure with probability ½, otherwise a rank-2 mixture.
pub fn random_state<R: Rng + ?Sized>(dims: &SystemDims, rng: &mut R) -> QuantumState {
    if rng.random_bool(0.5) {
        random_pure(dims, rng)
    } else {
        random_mixed(dims, 2, rng)
    }
}

fn single(dims: &SystemDims, party: usize) -> SystemDims {
    dims.select(&[party])
}

/// Product of random pure single-party states.
pub fn random_product_with<R: Rng + ?Sized>(dims: &SystemDims, rng: &mut R) -> QuantumState {
    let mut factors = (0..dims.parties()).map(|p| random_pure(&single(dims, p), rng));
    let first = factors.next().expect("at least one subsystem");
    factors.fold(first, |acc, f| acc.kron(&f))
}

pub fn random_product(dims: &SystemDims, seed: u64) -> QuantumState {
    random_product_with(dims, &mut seeded_rng(seed))
}

/// `ρ_solo ⊗ ρ_rest` across `cut` with each side a random (possibly mixed,
/// possibly entangled) state.
pub fn random_cut_product<R: Rng + ?Sized>(dims: &SystemDims, cut: Cut, rng: &mut R) -> QuantumState {
    let solo = random_state(&single(dims, cut.solo()), rng);
    let rest = random_state(&dims.select(&cut.rest()), rng);
    Component::cut_product(1.0, &solo, &rest, cut).expect("cut matches dims").state().clone()
}

/// `k` components, each a product across a uniformly chosen cut.
pub fn random_bisep_ensemble_with<R: Rng + ?Sized>(dims: &SystemDims, k: usize, rng: &mut R) -> Decomposition {
    let weights = random_weights(k.max(1), rng);
    let components = weights
        .into_iter()
        .map(|w| {
            let cut = Cut::new(rng.random_range(0..dims.parties()), dims.parties()).expect("cut within range");
            let state = random_cut_product(dims, cut, rng);
            Component::new(w, state, cut)
        })
        .collect();
    Decomposition::new(components).expect("simplex weights")
}

pub fn random_bisep_ensemble(dims: &SystemDims, k: usize, seed: u64) -> Decomposition {
    random_bisep_ensemble_with(dims, k, &mut seeded_rng(seed))
}

/// `k` full-product components with random single-party factors.
pub fn random_sep_ensemble_with<R: Rng + ?Sized>(dims: &SystemDims, k: usize, rng: &mut R) -> Decomposition {
    let weights = random_weights(k.max(1), rng);
    let components = weights
        .into_iter()
        .map(|w| {
            let factors = (0..dims.parties()).map(|p| random_state(&single(dims, p), rng)).collect();
            Component::product(w, factors).expect("single-party factors")
        })
        .collect();
    Decomposition::new(components).expect("simplex weights")
}

pub fn random_sep_ensemble(dims: &SystemDims, k: usize, seed: u64) -> Decomposition {
    random_sep_ensemble_with(dims, k, &mut seeded_rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::l1_coherence;
    use crate::detectors::{check_full_separable_equality, check_result3, check_result4, DETECTION_TOL};
    use approx::assert_abs_diff_eq;

    fn c(s: &QuantumState) -> f64 {
        l1_coherence(s).value()
    }

    fn reduced(s: &QuantumState, keep: &[usize]) -> f64 {
        c(&s.partial_trace(keep).unwrap())
    }

    #[test]
    fn example1_values() {
        assert_eq!(bisep_pure_state(1.0, 0.0, 0.0).unwrap(), QuantumState::basis(&[1, 0, 1], SystemDims::qubits(3)).unwrap());
        let t = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(c(&bisep_pure_state(t, t, t).unwrap()), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c(&bisep_pure_state(0.8, 0.6, 0.0).unwrap()), 0.96, epsilon = 1e-12);
        assert!(matches!(bisep_pure_state(0.8, 0.8, 0.0), Err(ZooError::NotNormalized(_))));
    }

    #[test]
    fn ghz_values() {
        assert_abs_diff_eq!(c(&ghz_state(std::f64::consts::FRAC_PI_4, 0.0)), 1.0, epsilon = 1e-12);
        let g = ghz_state(0.0, 0.9);
        assert_eq!(g, QuantumState::basis(&[0, 0, 0], SystemDims::qubits(3)).unwrap());
        assert_eq!(c(&g), 0.0);
    }

    #[test]
    fn example4_values() {
        let s = superposition_state(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(c(&s), 0.5 + 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(c(&superposition_state(FRAC_1_SQRT_2, 0.0).unwrap()), 1.0, epsilon = 1e-12);
        assert!(matches!(superposition_state(0.6, 0.6), Err(ZooError::NormalizationViolated(_))));
    }

    #[test]
    fn example4_reduced_coherences_on_grid() {
        for i in 0..50 {
            let a0 = FRAC_1_SQRT_2 * i as f64 / 49.0;
            let a1 = superposition_a1(a0);
            let s = superposition_state(a0, a1).unwrap();
            let two = 2.0 * a0 * a1;
            assert_abs_diff_eq!(reduced(&s, &[0]), two, epsilon = 1e-12);
            assert_abs_diff_eq!(reduced(&s, &[1]), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(reduced(&s, &[2]), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(reduced(&s, &[0, 1]), two, epsilon = 1e-12);
            assert_abs_diff_eq!(reduced(&s, &[0, 2]), two, epsilon = 1e-12);
            assert_abs_diff_eq!(reduced(&s, &[1, 2]), 2f64.sqrt() * a1, epsilon = 1e-12);
            assert_abs_diff_eq!(c(&s), two + 2f64.sqrt() * (a0 + a1), epsilon = 1e-12);
        }
    }

    #[test]
    fn mixtures_endpoints() {
        assert_abs_diff_eq!(c(&bell_mixture(0.5).unwrap().assemble()), 1.0, epsilon = 1e-12);
        let g = ghz_w_mixture(1.0).unwrap().assemble();
        assert!(g.matrix().max_abs_diff(ghz_state(std::f64::consts::FRAC_PI_4, 0.0).matrix()) < 1e-15);
        assert_abs_diff_eq!(c(&g), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c(&ghz_w_mixture(0.0).unwrap().assemble()), 2.0, epsilon = 1e-12);
        assert_eq!(ghz_w_mixture(1.2).unwrap_err(), ZooError::WeightOutOfRange(1.2));
        assert_eq!(bell_mixture(-0.1).unwrap_err(), ZooError::WeightOutOfRange(-0.1));
    }

    #[test]
    fn bell_mixture_component_layout() {
        let d = bell_mixture(0.3).unwrap();
        let [a, b] = d.components() else { panic!("two components") };
        // |0⟩_A ⊗ Φ⁺_BC has amplitude on |000⟩ and |011⟩
        assert_abs_diff_eq!(a.state().matrix().get(0, 3).re, 0.5, epsilon = 1e-15);
        // |1⟩_B ⊗ Φ⁻_AC has amplitude on |010⟩ and −|111⟩
        assert_abs_diff_eq!(b.state().matrix().get(2, 7).re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn extended_values() {
        let app = extended_states();
        assert_abs_diff_eq!(c(&app.four_qubit_biseparable.assemble()), 1.0, epsilon = 1e-12);
        let x = app.four_qubit_biseparable.x_by_cut().unwrap();
        for (got, want) in x.iter().zip([1.0, 1.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(c(&app.four_qubit_separable.assemble()), 0.0);
        let q = &app.qutrit_biseparable;
        assert_eq!(q.dims().as_slice(), &[3, 3, 3]);
        assert_abs_diff_eq!(c(&q.assemble()), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.x_by_cut().unwrap()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        let dims = SystemDims::qubits(3);
        assert_eq!(random_product(&dims, 7), random_product(&dims, 7));
        assert_ne!(random_product(&dims, 7), random_product(&dims, 8));
        assert_eq!(random_bisep_ensemble(&dims, 3, 1), random_bisep_ensemble(&dims, 3, 1));
        for seed in 0..20 {
            assert!(random_product(&dims, seed).validate(1e-9).is_valid());
            assert!(random_bisep_ensemble(&dims, 3, seed).assemble().validate(1e-9).is_valid());
            assert!(random_sep_ensemble(&dims, 4, seed).assemble().validate(1e-9).is_valid());
        }
    }

    #[test]
    fn named_states_validate() {
        let t = 1.0 / 3f64.sqrt();
        let states = [
            w_state(),
            ghz_state(0.3, 1.0),
            bisep_pure_state(t, t, t).unwrap(),
            superposition_state(0.5, 0.5).unwrap(),
            bell_mixture(0.4).unwrap().assemble(),
            ghz_w_mixture(0.4).unwrap().assemble(),
            four_qubit_biseparable().assemble(),
            four_qubit_separable().assemble(),
            qutrit_biseparable().assemble(),
        ];
        for s in &states {
            assert!(s.validate(1e-9).is_valid());
        }
    }

    #[test]
    fn seeded_examples_satisfy_their_checks() {
        let dims = SystemDims::qubits(3);
        assert!(check_full_separable_equality(&random_product(&dims, 7), DETECTION_TOL).unwrap().satisfied);
        assert!(check_result3(&random_bisep_ensemble(&dims, 3, 1), DETECTION_TOL).unwrap().satisfied);
        assert!(check_result4(&random_sep_ensemble(&dims, 4, 2), DETECTION_TOL).unwrap().satisfied);
    }
}
