use std::path::PathBuf;
use std::process::{Command, Output};

use coherence_cli::qstate;
use coherence_core::tensor::{QuantumState, SystemDims};
use coherence_core::zoo;
use proptest::prelude::*;

fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn qcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoh")).args(args).output().expect("binary runs")
}

fn qcoh_on(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = testdata(file);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    qcoh(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn coherence_of_w_file() {
    let o = qcoh_on("coherence", "w.qstate", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2.000000000000");
}

#[test]
fn coherence_of_diagonal_file() {
    let o = qcoh_on("coherence", "diagonal.qstate", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.000000000000");
}

#[test]
fn malformed_file_exits_2_with_line_number() {
    let o = qcoh_on("coherence", "malformed.qstate", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    let o = qcoh(&["coherence", "/definitely/not/here.qstate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unnormalized_file_exits_3() {
    for cmd in ["coherence", "classify"] {
        let o = qcoh_on(cmd, "unnormalized.qstate", &[]);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
    }
}

#[test]
fn classify_w_is_genuine_candidate() {
    let o = qcoh_on("classify", "w.qstate", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().last().unwrap(), "verdict: GENUINE_ENTANGLED_CANDIDATE");
    assert!(text.contains("mode: REDUCED_STATE_HEURISTIC"));
    let records: Vec<&str> = text.lines().filter(|l| l.ends_with("SAT") || l.ends_with("VIOLATED")).collect();
    assert_eq!(records.len(), 9);
    assert!(records.iter().all(|l| l.ends_with("VIOLATED")));
}

#[test]
fn classify_bell_mixture_satisfies_mixed_cut_bound() {
    let o = qcoh_on("classify", "bell_mixture.qstate", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("RESULT3")).unwrap();
    assert!(line.contains("lhs=2.000000000000"), "{line}");
    assert!(line.contains("rhs=2.250000000000"), "{line}");
    assert!(line.contains("slack=0.250000000000"), "{line}");
    assert!(line.ends_with(" SAT"));
    assert!(text.contains("mode: DECOMPOSITION_GIVEN"));
}

#[test]
fn classify_with_explicit_decomposition_file() {
    let state = testdata("bell_mixture.qstate");
    let s = state.to_str().unwrap();
    let o = qcoh(&["classify", s, s, "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("RESULT3") && l.ends_with(" SAT")));
}

#[test]
fn mismatched_decomposition_exits_4() {
    let o = qcoh_on("classify", "bell_mixture.qstate", &[testdata("bell_mixture_q03.qstate").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn mismatched_dims_exit_3() {
    let o = qcoh_on("classify", "w.qstate", &[testdata("diagonal.qstate").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn classify_superposition_violates_single_cut_bound_on_every_cut() {
    let o = qcoh_on("classify", "superposition_half.qstate", &[]);
    let text = stdout(&o);
    let r2: Vec<&str> = text.lines().filter(|l| l.starts_with("RESULT2")).collect();
    assert_eq!(r2.len(), 3);
    assert!(r2.iter().all(|l| l.ends_with("VIOLATED")));
    assert!(r2[0].contains("lhs=1.914213562373") && r2[0].contains("rhs=1.571383476483"));
}

#[test]
fn classify_separable_product_file_runs_separable_bound() {
    let o = qcoh_on("classify", "separable.qstate", &[]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("RESULT4")).map(str::to_owned).unwrap();
    assert!(line.ends_with(" SAT"), "{line}");
}

#[test]
fn reduce_w_prints_matrix_form() {
    let o = qcoh_on("reduce", "w.qstate", &["--keep", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = qstate::parse(&stdout(&o)).unwrap();
    let s = doc.state().unwrap();
    assert_eq!(s.dims(), &SystemDims::qubits(1));
    assert!((s.matrix().get(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
    assert!((s.matrix().get(1, 1).re - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(s.matrix().get(0, 1).norm(), 0.0);
}

#[test]
fn reduce_qutrit_pair() {
    let o = qcoh_on("reduce", "qutrit_pair.qstate", &["--keep", "1"]);
    let s = qstate::parse(&stdout(&o)).unwrap().state().unwrap();
    assert_eq!(s.side(), 3);
    assert_eq!(s.matrix().get(2, 2).re, 0.5);
}

#[test]
fn reduce_out_of_range_exits_3() {
    let o = qcoh_on("reduce", "w.qstate", &["--keep", "0,7"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn figure1_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qcoh(&["figure1", "--steps", "141", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a0,coherence,upper_bound,violated");
    assert_eq!(lines.len(), 142);
    assert_eq!(lines[1], "0.000000000,1.000000000,1.250000000,false");
    assert_eq!(lines[141], "0.707106781,1.000000000,0.000000000,true");
}

#[test]
fn figure1_default_steps_to_stdout() {
    let o = qcoh(&["figure1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 142);
}

#[test]
fn figure1_unwritable_path_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("out.csv");
    let o = qcoh(&["figure1", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn examples_exit_0() {
    let o = qcoh(&["examples"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
    assert!(text.lines().any(|l| l.starts_with("DISCREPANCY") && l.contains("C(rho) = 3")));
}

#[test]
fn oracle_suite_passes() {
    let o = qcoh(&["oracle", "product-law", "--trials", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = qcoh(&["oracle", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flag_is_usage_error() {
    let o = qcoh(&["figure1", "--steps", "many"]);
    assert_eq!(o.status.code(), Some(2));
}

fn random_state_of(local: Vec<usize>, seed: u64) -> QuantumState {
    let dims = SystemDims::new(local).unwrap();
    zoo::random_state(&dims, &mut zoo::seeded_rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_round_trip_within_1e_15(
        local in prop::collection::vec(2usize..=3, 1..=3),
        seed in any::<u64>(),
    ) {
        let s = random_state_of(local, seed);
        let back = qstate::parse(&qstate::write_matrix(&s)).unwrap().state().unwrap();
        prop_assert_eq!(back.dims(), s.dims());
        prop_assert!(back.matrix().max_abs_diff(s.matrix()) <= 1e-15);
    }

    #[test]
    fn pure_round_trip_within_1e_15(n in 1usize..=3, seed in any::<u64>()) {
        let dims = SystemDims::qubits(n);
        let amps = zoo::random_amplitudes(dims.total(), &mut zoo::seeded_rng(seed));
        let s = QuantumState::make_pure(&amps, dims.clone()).unwrap();
        let back = qstate::parse(&qstate::write_pure(&amps, &dims)).unwrap().state().unwrap();
        prop_assert!(back.matrix().max_abs_diff(s.matrix()) <= 1e-15);
    }

    #[test]
    fn decomposition_round_trip(k in 1usize..=4, seed in any::<u64>()) {
        let d = zoo::random_bisep_ensemble(&SystemDims::qubits(3), k, seed);
        let back = qstate::parse(&qstate::write_decomposition(&d)).unwrap().decomposition().unwrap();
        prop_assert!(back.assemble().matrix().max_abs_diff(d.assemble().matrix()) <= 1e-15);
    }
}
