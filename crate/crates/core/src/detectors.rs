//! Coherence-based separability and biseparability checks.
//!
//! Every check here is a necessary condition: a state assembled to satisfy a
//! check's premise never violates it, so a violation is conclusive while a
//! satisfied check is not.
//!
//! * product equality across a one-vs-rest cut: `C(ρ) = C(ρ_solo) ⊕ C(ρ_rest)`
//!   where `⊕` is [`product_law`];
//! * full product equality: `C(ρ) = ⊕_k C(ρ_k)` over single-party reductions;
//! * single-cut bound: `C(Σ p_i σ_i) ≤ Σ p_i (X_i + X_i²/4)`;
//! * mixed-cut bound: `1 + C(Σ p_i σ_i) ≤ ¼ Σ p_i (X_i + 2)²`;
//! * separable bound: `C(Σ p_i σ_i) ≤ Σ p_i ⊕_k C(σ_i^k)`;
//!
//! with `X_i = C(σ_i^solo) + C(σ_i^rest)` taken across component `i`'s cut.

use std::fmt;

use thiserror::Error;

use crate::coherence::{l1_coherence, product_law, product_law_n, Coherence};
use crate::tensor::{QuantumState, StateError, SystemDims, HERMITIAN_TOL};

/// Default tolerance for deciding whether a check holds.
pub const DETECTION_TOL: f64 = 1e-9;

/// `tr ρ²` tolerance used to decide that a state is pure.
const PURITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("cut solo index {solo} out of range for {parties} parties")]
    InvalidCut { solo: usize, parties: usize },
    #[error("components disagree on the cut; the single-cut bound needs one cut")]
    MixedCuts,
    #[error("component {0} has no cut label")]
    MissingCut(usize),
    #[error("product factors do not match the subsystem layout: {0}")]
    FactorDimMismatch(String),
    #[error("decomposition does not reproduce the state (max entry deviation {deviation:e})")]
    DecompositionMismatch { deviation: f64 },
    #[error("decomposition dims {decomposition} differ from state dims {state}")]
    DimsMismatch { state: SystemDims, decomposition: SystemDims },
}

/// One-vs-rest bipartition: subsystem `solo` against all others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cut {
    solo: usize,
    parties: usize,
}

impl Cut {
    pub fn new(solo: usize, parties: usize) -> Result<Self, DetectError> {
        if parties < 2 || solo >= parties {
            return Err(DetectError::InvalidCut { solo, parties });
        }
        Ok(Self { solo, parties })
    }

    pub fn solo(&self) -> usize {
        self.solo
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn rest(&self) -> Vec<usize> {
        (0..self.parties).filter(|&p| p != self.solo).collect()
    }

    /// Every one-vs-rest cut of `parties` subsystems, solo index ascending.
    pub fn all(parties: usize) -> Vec<Cut> {
        (0..parties).map(|solo| Cut { solo, parties }).collect()
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |p: usize| char::from(b'A' + (p % 26) as u8);
        write!(f, "{}-", name(self.solo))?;
        for p in self.rest() {
            write!(f, "{}", name(p))?;
        }
        Ok(())
    }
}

/// One weighted term of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    weight: f64,
    state: QuantumState,
    cut: Option<Cut>,
    factors: Option<Vec<QuantumState>>,
}

impl Component {
    /// A term claimed to be a product across `cut`.
    pub fn new(weight: f64, state: QuantumState, cut: Cut) -> Self {
        Self { weight, state, cut: Some(cut), factors: None }
    }

    /// A term with no structural claim.
    pub fn untagged(weight: f64, state: QuantumState) -> Self {
        Self { weight, state, cut: None, factors: None }
    }

    /// A full product term from one single-party factor per subsystem.
    pub fn product(weight: f64, factors: Vec<QuantumState>) -> Result<Self, DetectError> {
        let mut iter = factors.iter();
        let first = iter
            .next()
            .ok_or_else(|| DetectError::FactorDimMismatch("product with no factors".into()))?;
        if let Some(bad) = factors.iter().position(|f| f.parties() != 1) {
            return Err(DetectError::FactorDimMismatch(format!(
                "factor {bad} spans {} subsystems",
                factors[bad].parties()
            )));
        }
        let state = iter.fold(first.clone(), |acc, f| acc.kron(f));
        Ok(Self { weight, state, cut: None, factors: Some(factors) })
    }

    /// `solo ⊗ rest` placed back into ket-string order, tagged with `cut`.
    pub fn cut_product(
        weight: f64,
        solo: &QuantumState,
        rest: &QuantumState,
        cut: Cut,
    ) -> Result<Self, DetectError> {
        if solo.parties() != 1 || rest.parties() + 1 != cut.parties() {
            return Err(DetectError::FactorDimMismatch(format!(
                "solo spans {} and rest spans {} subsystems for cut {cut}",
                solo.parties(),
                rest.parties()
            )));
        }
        let joined = solo.kron(rest);
        // joined layout: [solo, rest...]; position of each original subsystem
        let mut order = Vec::with_capacity(cut.parties());
        for p in 0..cut.parties() {
            order.push(match p.cmp(&cut.solo()) {
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Less => p + 1,
                std::cmp::Ordering::Greater => p,
            });
        }
        let state = joined.permute(&order)?;
        Ok(Self::new(weight, state, cut))
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn cut(&self) -> Option<Cut> {
        self.cut
    }

    pub fn factors(&self) -> Option<&[QuantumState]> {
        self.factors.as_deref()
    }

    pub fn with_cut(mut self, cut: Cut) -> Self {
        self.cut = Some(cut);
        self
    }

    /// Cut used by the cut-based bounds; a full product is a product across every cut.
    fn effective_cut(&self) -> Option<Cut> {
        self.cut.or_else(|| self.factors.as_ref().map(|_| Cut { solo: 0, parties: self.state.parties() }))
    }
}

/// Weighted list of components sharing one subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    dims: SystemDims,
    components: Vec<Component>,
}

impl Decomposition {
    pub fn new(components: Vec<Component>) -> Result<Self, DetectError> {
        let first = components.first().ok_or(StateError::EmptyMixture)?;
        let dims = first.state.dims().clone();
        let mut sum = 0.0;
        for c in &components {
            if !(0.0..=1.0).contains(&c.weight) || !c.weight.is_finite() {
                return Err(StateError::WeightOutOfRange(c.weight).into());
            }
            if c.state.dims() != &dims {
                return Err(StateError::DimsMismatch { left: dims.clone(), right: c.state.dims().clone() }.into());
            }
            if let Some(cut) = c.cut {
                if cut.parties() != dims.parties() {
                    return Err(DetectError::InvalidCut { solo: cut.solo(), parties: dims.parties() });
                }
            }
            if let Some(factors) = &c.factors {
                let local: Vec<usize> = factors.iter().map(|f| f.dims().local(0)).collect();
                if local != dims.as_slice() {
                    return Err(DetectError::FactorDimMismatch(format!(
                        "factor dims {local:?} vs state dims {dims}"
                    )));
                }
            }
            sum += c.weight;
        }
        if (sum - 1.0).abs() > HERMITIAN_TOL {
            return Err(StateError::WeightSumInvalid { sum }.into());
        }
        Ok(Self { dims, components })
    }

    /// Single term of weight one, tagged with `cut`.
    pub fn single(state: QuantumState, cut: Cut) -> Result<Self, DetectError> {
        Self::new(vec![Component::new(1.0, state, cut)])
    }

    pub fn dims(&self) -> &SystemDims {
        &self.dims
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `Σ p_i σ_i`
    pub fn assemble(&self) -> QuantumState {
        let terms: Vec<(f64, &QuantumState)> = self.components.iter().map(|c| (c.weight, &c.state)).collect();
        QuantumState::mix(&terms).expect("weights and dims checked on construction")
    }

    /// True when every component is a full product of single-party factors.
    pub fn is_fully_product(&self) -> bool {
        self.components.iter().all(|c| c.factors.is_some())
    }

    /// Weight-averaged `X` per cut (indexed by solo subsystem); cuts with no
    /// component contribute `0`, matching a zero weight.
    pub fn x_by_cut(&self) -> Result<Vec<f64>, DetectError> {
        let parties = self.dims.parties();
        let mut weighted = vec![0.0; parties];
        let mut weight = vec![0.0; parties];
        for (i, c) in self.components.iter().enumerate() {
            let cut = c.effective_cut().ok_or(DetectError::MissingCut(i))?;
            weighted[cut.solo()] += c.weight * cut_x(&c.state, cut)?;
            weight[cut.solo()] += c.weight;
        }
        Ok(weighted.iter().zip(&weight).map(|(&x, &w)| if w > 0.0 { x / w } else { 0.0 }).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    /// Single-cut bound.
    Result2,
    /// Mixed-cut bound.
    Result3,
    /// Separable bound.
    Result4,
    /// Product equality across one cut.
    Corollary2Eq,
    /// Full product equality.
    Corollary3Eq,
}

impl CheckKind {
    pub fn is_equality(self) -> bool {
        matches!(self, CheckKind::Corollary2Eq | CheckKind::Corollary3Eq)
    }

    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Result2 => "RESULT2",
            CheckKind::Result3 => "RESULT3",
            CheckKind::Result4 => "RESULT4",
            CheckKind::Corollary2Eq => "COROLLARY2_EQ",
            CheckKind::Corollary3Eq => "COROLLARY3_EQ",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One evaluated check. `slack = rhs - lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityRecord {
    pub kind: CheckKind,
    pub cut: Option<Cut>,
    pub lhs: f64,
    pub rhs: f64,
    pub x_terms: Vec<f64>,
    pub satisfied: bool,
    pub slack: f64,
}

impl InequalityRecord {
    fn evaluate(kind: CheckKind, cut: Option<Cut>, lhs: f64, rhs: f64, x_terms: Vec<f64>, tol: f64) -> Self {
        let satisfied = if kind.is_equality() { (lhs - rhs).abs() <= tol } else { lhs <= rhs + tol };
        Self { kind, cut, lhs, rhs, x_terms, satisfied, slack: rhs - lhs }
    }

    pub fn violated(&self) -> bool {
        !self.satisfied
    }
}

/// `C(ρ_solo) + C(ρ_rest)` across `cut`.
pub fn cut_x(state: &QuantumState, cut: Cut) -> Result<f64, DetectError> {
    let (solo, rest) = cut_coherences(state, cut)?;
    Ok(solo.value() + rest.value())
}

fn cut_coherences(state: &QuantumState, cut: Cut) -> Result<(Coherence, Coherence), DetectError> {
    if cut.parties() != state.parties() {
        return Err(DetectError::InvalidCut { solo: cut.solo(), parties: state.parties() });
    }
    let solo = l1_coherence(&state.partial_trace(&[cut.solo()])?);
    let rest = l1_coherence(&state.partial_trace(&cut.rest())?);
    Ok((solo, rest))
}

fn single_party_coherences(state: &QuantumState) -> Result<Vec<Coherence>, DetectError> {
    if state.parties() == 1 {
        return Ok(vec![l1_coherence(state)]);
    }
    (0..state.parties()).map(|p| Ok(l1_coherence(&state.partial_trace(&[p])?))).collect()
}

/// Single-cut bound right-hand side `Σ p_i (X_i + X_i²/4)`.
pub fn single_cut_bound(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|&(p, x)| p * (x + x * x / 4.0)).sum()
}

/// Mixed-cut bound right-hand side `¼ Σ p_i (X_i + 2)²`.
pub fn mixed_cut_bound(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|&(p, x)| p * (x + 2.0) * (x + 2.0)).sum::<f64>() / 4.0
}

/// Product equality across `cut`; a violation rules out `ρ = ρ_solo ⊗ ρ_rest`.
pub fn check_product_equality(state: &QuantumState, cut: Cut, tol: f64) -> Result<InequalityRecord, DetectError> {
    let (solo, rest) = cut_coherences(state, cut)?;
    let lhs = l1_coherence(state).value();
    let rhs = product_law(solo, rest).value();
    Ok(InequalityRecord::evaluate(
        CheckKind::Corollary2Eq,
        Some(cut),
        lhs,
        rhs,
        vec![solo.value() + rest.value()],
        tol,
    ))
}

/// Full product equality over single-party reductions; a violation rules out
/// `ρ = ρ_A ⊗ ρ_B ⊗ …`.
pub fn check_full_separable_equality(state: &QuantumState, tol: f64) -> Result<InequalityRecord, DetectError> {
    let singles = single_party_coherences(state)?;
    let lhs = l1_coherence(state).value();
    let rhs = product_law_n(singles.iter().copied()).value();
    Ok(InequalityRecord::evaluate(
        CheckKind::Corollary3Eq,
        None,
        lhs,
        rhs,
        singles.iter().map(|c| c.value()).collect(),
        tol,
    ))
}

fn weighted_x(d: &Decomposition) -> Result<Vec<(f64, f64, Cut)>, DetectError> {
    d.components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let cut = c.effective_cut().ok_or(DetectError::MissingCut(i))?;
            Ok((c.weight, cut_x(&c.state, cut)?, cut))
        })
        .collect()
}

/// Single-cut bound; every component must share one cut.
pub fn check_result2(d: &Decomposition, tol: f64) -> Result<InequalityRecord, DetectError> {
    let terms = weighted_x(d)?;
    let cut = terms[0].2;
    if terms.iter().any(|t| t.2 != cut) {
        return Err(DetectError::MixedCuts);
    }
    let pairs: Vec<(f64, f64)> = terms.iter().map(|t| (t.0, t.1)).collect();
    let lhs = l1_coherence(&d.assemble()).value();
    let rhs = single_cut_bound(&pairs);
    let xs = pairs.iter().map(|t| t.1).collect();
    Ok(InequalityRecord::evaluate(CheckKind::Result2, Some(cut), lhs, rhs, xs, tol))
}

/// Mixed-cut bound; `x_terms` lists `X_i` per component in order.
pub fn check_result3(d: &Decomposition, tol: f64) -> Result<InequalityRecord, DetectError> {
    let terms = weighted_x(d)?;
    let pairs: Vec<(f64, f64)> = terms.iter().map(|t| (t.0, t.1)).collect();
    let lhs = 1.0 + l1_coherence(&d.assemble()).value();
    let rhs = mixed_cut_bound(&pairs);
    let cut = terms.iter().all(|t| t.2 == terms[0].2).then_some(terms[0].2);
    let xs = pairs.iter().map(|t| t.1).collect();
    Ok(InequalityRecord::evaluate(CheckKind::Result3, cut, lhs, rhs, xs, tol))
}

/// Separable bound. Components carrying factors use them; others use their
/// single-party reductions, which coincide with the factors for products.
/// `x_terms` lists each component's product-law value.
pub fn check_result4(d: &Decomposition, tol: f64) -> Result<InequalityRecord, DetectError> {
    let mut per_component = Vec::with_capacity(d.components.len());
    for c in &d.components {
        let singles: Vec<Coherence> = match &c.factors {
            Some(factors) => factors.iter().map(l1_coherence).collect(),
            None => single_party_coherences(&c.state)?,
        };
        per_component.push(product_law_n(singles).value());
    }
    let lhs = l1_coherence(&d.assemble()).value();
    let rhs = d.components.iter().zip(&per_component).map(|(c, v)| c.weight * v).sum();
    Ok(InequalityRecord::evaluate(CheckKind::Result4, None, lhs, rhs, per_component, tol))
}

/// Mixed-cut bound for a state with no decomposition: each cut's candidate is
/// the state itself with `X` from its own reductions. Since `¼ Σ p_k (X_k+2)²`
/// never exceeds its largest term, the record uses the most lenient cut, so a
/// violation holds for every weighting. `x_terms` lists `X` per cut.
pub fn check_result3_reduced(state: &QuantumState, tol: f64) -> Result<InequalityRecord, DetectError> {
    let cuts = Cut::all(state.parties());
    let xs: Vec<f64> = cuts.iter().map(|&c| cut_x(state, c)).collect::<Result<_, _>>()?;
    let (best, x_best) = xs
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc });
    let lhs = 1.0 + l1_coherence(state).value();
    let rhs = mixed_cut_bound(&[(1.0, x_best)]);
    Ok(InequalityRecord::evaluate(CheckKind::Result3, Some(cuts[best]), lhs, rhs, xs, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithSeparable,
    ConsistentWithBiseparable,
    NotSeparable,
    NotBiseparable,
    GenuineEntangledCandidate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::ConsistentWithSeparable => "CONSISTENT_WITH_SEPARABLE",
            Verdict::ConsistentWithBiseparable => "CONSISTENT_WITH_BISEPARABLE",
            Verdict::NotSeparable => "NOT_SEPARABLE",
            Verdict::NotBiseparable => "NOT_BISEPARABLE",
            Verdict::GenuineEntangledCandidate => "GENUINE_ENTANGLED_CANDIDATE",
        }
    }

    /// The verdict rests on a violated separability check.
    pub fn excludes_separable(self) -> bool {
        matches!(
            self,
            Verdict::NotSeparable | Verdict::ConsistentWithBiseparable | Verdict::GenuineEntangledCandidate
        )
    }

    /// The verdict rests on violated biseparability checks.
    pub fn excludes_biseparable(self) -> bool {
        matches!(self, Verdict::NotBiseparable | Verdict::GenuineEntangledCandidate)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    DecompositionGiven,
    ReducedStateHeuristic,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::DecompositionGiven => "DECOMPOSITION_GIVEN",
            Mode::ReducedStateHeuristic => "REDUCED_STATE_HEURISTIC",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub records: Vec<InequalityRecord>,
    pub verdict: Verdict,
    pub mode: Mode,
    pub pure: bool,
}

impl ClassificationReport {
    pub fn records_of(&self, kind: CheckKind) -> impl Iterator<Item = &InequalityRecord> {
        self.records.iter().filter(move |r| r.kind == kind)
    }
}

/// Aggregates records into a verdict.
///
/// A cut is excluded by a violated single-cut bound on it, or (for a pure
/// state) by a violated product equality on it. Biseparability is violated
/// when the mixed-cut bound fails or every cut is excluded; separability is
/// violated when the separable bound or the full product equality fails.
/// Satisfied records can only add support, never remove an exclusion.
pub fn verdict_from_records(records: &[InequalityRecord], parties: usize, pure: bool) -> Verdict {
    let violated = |kind: CheckKind| records.iter().any(|r| r.kind == kind && r.violated());
    let excluded = |solo: usize| {
        records.iter().any(|r| {
            r.violated()
                && r.cut.map(|c| c.solo()) == Some(solo)
                && (r.kind == CheckKind::Result2 || (pure && r.kind == CheckKind::Corollary2Eq))
        })
    };

    let sep_violated = violated(CheckKind::Result4) || violated(CheckKind::Corollary3Eq);
    let bisep_violated = violated(CheckKind::Result3) || (parties >= 2 && (0..parties).all(excluded));
    let product_support = records.iter().any(|r| {
        r.kind == CheckKind::Corollary2Eq && r.satisfied && r.cut.is_some_and(|c| !excluded(c.solo()))
    });

    match (sep_violated, bisep_violated) {
        (true, true) => Verdict::GenuineEntangledCandidate,
        (false, true) => Verdict::NotBiseparable,
        (true, false) if product_support => Verdict::ConsistentWithBiseparable,
        (true, false) => Verdict::NotSeparable,
        (false, false) => Verdict::ConsistentWithSeparable,
    }
}

/// Runs every applicable check on `state` and aggregates a verdict.
///
/// The product equalities run on every cut. With a decomposition, the
/// mixed-cut bound always runs, the single-cut bound runs when all
/// components share a cut and the separable bound runs when every component
/// is a full product. Without one, the bounds run on the state's own
/// reductions (one candidate per cut), which is exact for pure states.
pub fn classify(
    state: &QuantumState,
    decomposition: Option<&Decomposition>,
    tol: f64,
) -> Result<ClassificationReport, DetectError> {
    let parties = state.parties();
    let cuts = Cut::all(parties);
    let mut records = vec![check_full_separable_equality(state, tol)?];
    for &cut in &cuts {
        records.push(check_product_equality(state, cut, tol)?);
    }

    let mode = match decomposition {
        Some(d) => {
            if d.dims() != state.dims() {
                return Err(DetectError::DimsMismatch { state: state.dims().clone(), decomposition: d.dims().clone() });
            }
            let deviation = d.assemble().matrix().max_abs_diff(state.matrix());
            if deviation > HERMITIAN_TOL {
                return Err(DetectError::DecompositionMismatch { deviation });
            }
            match check_result2(d, tol) {
                Ok(r) => records.push(r),
                Err(DetectError::MixedCuts) => {}
                Err(e) => return Err(e),
            }
            records.push(check_result3(d, tol)?);
            if d.is_fully_product() {
                records.push(check_result4(d, tol)?);
            }
            Mode::DecompositionGiven
        }
        None => {
            for &cut in &cuts {
                records.push(check_result2(&Decomposition::single(state.clone(), cut)?, tol)?);
            }
            records.push(check_result3_reduced(state, tol)?);
            let untagged = Decomposition::new(vec![Component::untagged(1.0, state.clone())])?;
            records.push(check_result4(&untagged, tol)?);
            Mode::ReducedStateHeuristic
        }
    };

    let pure = state.is_pure(PURITY_TOL);
    let verdict = verdict_from_records(&records, parties, pure);
    Ok(ClassificationReport { records, verdict, mode, pure })
}
