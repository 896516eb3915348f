//! Subcommand bodies. Each writes to the given sink and returns a
//! [`CliError`] whose [`CliError::exit_code`] the binary exits with.
//!
//! Exit codes: 0 success, 1 failed reproduction or oracle suite, 2 unreadable
//! or malformed input, 3 invalid state or mismatched dims, 4 decomposition
//! that does not reproduce the state, 5 unwritable output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use coherence_core::coherence::l1_coherence;
use coherence_core::detectors::{classify as classify_state, DetectError, Decomposition};
use coherence_core::oracle::{self, OracleReport, ORACLE_TOL};
use coherence_core::tensor::{QuantumState, SystemDims};
use coherence_core::zoo::ZooError;
use thiserror::Error;

use crate::examples;
use crate::figure1;
use crate::qstate::{self, Body, BuildError, Document, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Build { path: PathBuf, source: BuildError },
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Output(#[from] io::Error),
}

fn detect_code(e: &DetectError) -> i32 {
    match e {
        DetectError::DecompositionMismatch { .. } => 4,
        _ => 3,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Build { source, .. } => detect_code(&source.source),
            CliError::Detect(e) => detect_code(e),
            CliError::Zoo(ZooError::Detect(e)) => detect_code(e),
            CliError::Zoo(_) => 3,
            CliError::Write { .. } => 5,
            // stdout gone; nothing more useful to report
            CliError::Output(_) => 1,
        }
    }
}

pub fn load(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    qstate::parse(&text).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn state_of(path: &Path, doc: &Document) -> Result<QuantumState, CliError> {
    doc.state().map_err(|source| CliError::Build { path: path.into(), source })
}

fn decomposition_of(path: &Path, doc: &Document) -> Result<Decomposition, CliError> {
    doc.decomposition().map_err(|source| CliError::Build { path: path.into(), source })
}

pub fn coherence<W: Write>(path: &Path, out: &mut W) -> Result<(), CliError> {
    let doc = load(path)?;
    let state = state_of(path, &doc)?;
    writeln!(out, "{:.12}", l1_coherence(&state).value())?;
    Ok(())
}

/// Classifies the state in `path`. The decomposition comes from
/// `decomposition` when given, else from the file itself when its body is
/// `mixed` or `product`; otherwise the reduced-state heuristic runs.
pub fn classify<W: Write>(path: &Path, decomposition: Option<&Path>, tol: f64, out: &mut W) -> Result<(), CliError> {
    let doc = load(path)?;
    let state = state_of(path, &doc)?;
    let d = match decomposition {
        Some(dp) => Some(decomposition_of(dp, &load(dp)?)?),
        None if matches!(doc.body, Body::Mixed(_) | Body::Product(_)) => Some(decomposition_of(path, &doc)?),
        None => None,
    };
    let report = classify_state(&state, d.as_ref(), tol)?;
    for r in &report.records {
        let cut = r.cut.map_or_else(|| "-".to_string(), |c| c.to_string());
        writeln!(
            out,
            "{:<14} {:<8} lhs={:.12} rhs={:.12} slack={:.12} {}",
            r.kind.label(),
            cut,
            r.lhs,
            r.rhs,
            r.slack,
            if r.satisfied { "SAT" } else { "VIOLATED" }
        )?;
    }
    writeln!(out, "mode: {}", report.mode.label())?;
    writeln!(out, "verdict: {}", report.verdict.label())?;
    Ok(())
}

/// Writes the sweep CSV to `out_path`, or to `out` when no path is given.
pub fn figure1<W: Write>(steps: usize, out_path: Option<&Path>, tol: f64, out: &mut W) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    let rows = figure1::sweep(steps, tol)?;
    match out_path {
        Some(p) => {
            let write_err = |source| CliError::Write { path: p.into(), source };
            let mut buf = Vec::new();
            figure1::write_csv(&rows, &mut buf)?;
            fs::write(p, buf).map_err(write_err)?;
            let violated = rows.iter().filter(|r| r.violated).count();
            writeln!(out, "wrote {} rows to {} ({violated} violated)", rows.len(), p.display())?;
        }
        None => figure1::write_csv(&rows, out)?,
    }
    Ok(())
}

/// Prints the reproduction table; `Ok(false)` when any row fails.
pub fn examples<W: Write>(out: &mut W) -> Result<bool, CliError> {
    let rows = examples::run();
    for r in &rows {
        writeln!(out, "{r}")?;
    }
    let count = |s: examples::Status| rows.iter().filter(|r| r.status == s).count();
    writeln!(
        out,
        "{} rows: {} PASS, {} DISCREPANCY, {} FAIL",
        rows.len(),
        count(examples::Status::Pass),
        count(examples::Status::Discrepancy),
        count(examples::Status::Fail)
    )?;
    Ok(examples::all_reproduced(&rows))
}

pub fn reduce<W: Write>(path: &Path, keep: &[usize], out: &mut W) -> Result<(), CliError> {
    let doc = load(path)?;
    let state = state_of(path, &doc)?;
    let reduced = state.partial_trace(keep).map_err(DetectError::from)?;
    write!(out, "{}", qstate::write_matrix(&reduced))?;
    Ok(())
}

pub const ORACLE_SUITES: [&str; 4] = ["product-law", "convexity", "soundness", "all"];

const CONVEXITY_COMPONENTS: usize = 3;

fn dims(local: &[usize]) -> SystemDims {
    SystemDims::new(local.to_vec()).expect("fixed oracle dims are valid")
}

fn report_line<W: Write>(out: &mut W, suite: &str, layout: &str, r: &OracleReport) -> io::Result<()> {
    writeln!(
        out,
        "{suite:<12} {layout:<14} trials={:<6} max_abs_error={:.3e} failures={} {}",
        r.trials,
        r.max_abs_error,
        r.failures.len(),
        if r.passed() { "PASS" } else { "FAIL" }
    )?;
    for f in &r.failures {
        writeln!(out, "  seed {}: {}", f.seed, f.description)?;
    }
    Ok(())
}

/// Runs an oracle suite on qubit and qutrit layouts; `Ok(false)` on any
/// failure.
pub fn oracle<W: Write>(suite: &str, trials: usize, seed: u64, out: &mut W) -> Result<bool, CliError> {
    if !ORACLE_SUITES.contains(&suite) {
        return Err(CliError::Usage(format!("unknown suite '{suite}', expected one of {}", ORACLE_SUITES.join(", "))));
    }
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let run = |name: &str| suite == name || suite == "all";
    let mut passed = true;
    if run("product-law") {
        for (a, b) in [(&[2][..], &[2, 2][..]), (&[2, 2], &[2, 2]), (&[3], &[3, 3])] {
            let r = oracle::verify_product_law(trials, &dims(a), &dims(b), ORACLE_TOL, seed);
            report_line(out, "product-law", &format!("{} x {}", dims(a), dims(b)), &r)?;
            passed &= r.passed();
        }
    }
    if run("convexity") {
        for local in [&[2, 2, 2][..], &[3, 3, 3]] {
            let r = oracle::verify_convexity(trials, &dims(local), CONVEXITY_COMPONENTS, ORACLE_TOL, seed);
            report_line(out, "convexity", &dims(local).to_string(), &r)?;
            passed &= r.passed();
        }
    }
    if run("soundness") {
        for local in [&[2, 2, 2][..], &[3, 3, 3]] {
            let layout = dims(local);
            let r = oracle::verify_detector_soundness(trials, &layout, coherence_core::DETECTION_TOL, seed)?;
            report_line(out, "product-eq", &layout.to_string(), &r.product_equality)?;
            report_line(out, "mixed-cut", &layout.to_string(), &r.result3)?;
            report_line(out, "separable", &layout.to_string(), &r.result4)?;
            passed &= r.passed();
        }
    }
    Ok(passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coherence_core::tensor::StateError;

    #[test]
    fn exit_codes() {
        let build = |source: DetectError| CliError::Build {
            path: "f".into(),
            source: BuildError { line: 3, source },
        };
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(build(StateError::NonFinite.into()).exit_code(), 3);
        assert_eq!(CliError::Detect(DetectError::DecompositionMismatch { deviation: 1.0 }).exit_code(), 4);
        assert_eq!(CliError::Detect(DetectError::MixedCuts).exit_code(), 3);
        assert_eq!(CliError::Write { path: "p".into(), source: io::Error::other("x") }.exit_code(), 5);
        assert_eq!(CliError::Read { path: "p".into(), source: io::Error::other("x") }.exit_code(), 2);
    }

    #[test]
    fn unknown_suite_is_usage_error() {
        let e = oracle("nope", 1, 0, &mut Vec::new()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn small_oracle_run_passes() {
        let mut buf = Vec::new();
        assert!(oracle("all", 5, 1, &mut buf).unwrap());
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3 + 2 + 6);
        assert!(text.lines().all(|l| l.ends_with("PASS")));
    }

    #[test]
    fn figure1_to_stdout() {
        let mut buf = Vec::new();
        figure1(3, None, 1e-9, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
        assert_eq!(figure1(1, None, 1e-9, &mut Vec::new()).unwrap_err().exit_code(), 2);
    }
}
