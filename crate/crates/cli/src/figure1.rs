//! Coherence of `a0|000⟩ + a1|100⟩ + |111⟩/√2` against the single-cut bound
//! on A-BC, swept over `a0 ∈ [0, 1/√2]`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

use coherence_core::detectors::{check_result2, Cut, Decomposition};
use coherence_core::zoo::{superposition_a1, superposition_state, ZooError};

pub const DEFAULT_STEPS: usize = 141;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub a0: f64,
    pub coherence: f64,
    pub upper_bound: f64,
    pub violated: bool,
}

/// One sweep row, decided at `tol`.
pub fn row(a0: f64, tol: f64) -> Result<SweepRow, ZooError> {
    let state = superposition_state(a0, superposition_a1(a0))?;
    let cut = Cut::new(0, 3)?;
    let record = check_result2(&Decomposition::single(state, cut)?, tol)?;
    Ok(SweepRow { a0, coherence: record.lhs, upper_bound: record.rhs, violated: record.violated() })
}

/// `steps` evenly spaced rows from `a0 = 0` to `a0 = 1/√2` inclusive.
pub fn sweep(steps: usize, tol: f64) -> Result<Vec<SweepRow>, ZooError> {
    assert!(steps >= 2, "a sweep needs both endpoints");
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let a0 = if i + 1 == steps { FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 * i as f64 / last };
            row(a0, tol)
        })
        .collect()
}

pub const CSV_HEADER: &str = "a0,coherence,upper_bound,violated";

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{:.9},{:.9},{:.9},{}", r.a0, r.coherence, r.upper_bound, r.violated)?;
    }
    Ok(())
}

/// `coherence - upper_bound`; positive where the bound fails.
pub fn gap(a0: f64) -> Result<f64, ZooError> {
    let r = row(a0, 0.0)?;
    Ok(r.coherence - r.upper_bound)
}

/// Bisection for the sign change of [`gap`] on `[lo, hi]`; `None` when the
/// endpoints share a sign.
pub fn crossover(mut lo: f64, mut hi: f64, tol: f64) -> Result<Option<f64>, ZooError> {
    let g_lo = gap(lo)?;
    if g_lo.signum() == gap(hi)?.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if gap(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
