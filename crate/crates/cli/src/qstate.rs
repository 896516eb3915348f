//! QSTATE v1: a line-oriented text format for states and decompositions.
//!
//! ```text
//! qstate v1
//! dims 2 2 2
//! pure
//! amp 100 0.5773502691896258 0
//! amp 010 0.5773502691896258 0
//! amp 001 0.5773502691896258 0
//! ```
//!
//! After the `dims` line comes exactly one body:
//! - `pure`, then `amp <digits> <re> <im>` lines (one digit per subsystem,
//!   unlisted amplitudes are zero);
//! - `matrix`, then `side` rows of `2·side` reals as `re im` pairs;
//! - `product`, then one `factor <d>` line per subsystem, each followed by a
//!   single-party `pure` or `matrix` body;
//! - `mixed`, then blocks `component <p> [cut <i>]`, an optional `cut <i>`
//!   line, one nested `pure`/`matrix`/`product` body, and `end`.
//!
//! `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use coherence_core::detectors::{Component, Cut, Decomposition, DetectError};
use coherence_core::tensor::{DMatrix, QuantumState, StateError, SystemDims, Validation, C64};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// A parsed body before any physical validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Pure(Vec<(Vec<usize>, C64)>),
    Matrix(Vec<C64>),
    Product(Vec<Body>),
    Mixed(Vec<ComponentSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub weight: f64,
    pub cut: Option<usize>,
    pub body: Body,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub dims: SystemDims,
    pub body: Body,
    /// Line of the body keyword.
    pub body_line: usize,
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let content = raw.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = content.split_whitespace().collect();
                (!tokens.is_empty()).then_some((i + 1, tokens))
            })
            .collect();
        let last_line = text.lines().count().max(1);
        Self { items, pos: 0, last_line }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        self.pos += 1;
        item
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        let last = self.last_line;
        self.next().ok_or_else(|| err(last, format!("unexpected end of input, expected {what}")))
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.peek().map(|(_, t)| t[0])
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn real(line: usize, token: &str) -> Result<f64, ParseError> {
    let v: f64 = token.parse().map_err(|_| err(line, format!("invalid number '{token}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, format!("non-finite number '{token}'")))
    }
}

fn arity(line: usize, tokens: &[&str], n: usize) -> Result<(), ParseError> {
    if tokens.len() == n {
        Ok(())
    } else {
        Err(err(line, format!("'{}' expects {} fields, found {}", tokens[0], n - 1, tokens.len() - 1)))
    }
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut lines = Lines::new(text);

    let (n, header) = lines.expect("header 'qstate v1'")?;
    if header != ["qstate", "v1"] {
        return Err(err(n, format!("expected header 'qstate v1', found '{}'", header.join(" "))));
    }

    let (n, tokens) = lines.expect("'dims' line")?;
    if tokens[0] != "dims" || tokens.len() < 2 {
        return Err(err(n, "expected 'dims d1 d2 ...'"));
    }
    let local: Vec<usize> = tokens[1..]
        .iter()
        .map(|t| t.parse().map_err(|_| err(n, format!("invalid dimension '{t}'"))))
        .collect::<Result<_, _>>()?;
    let dims = SystemDims::new(local).map_err(|e| err(n, e.to_string()))?;

    let body_line = lines.peek().map_or(n + 1, |(l, _)| *l);
    let body = parse_body(&mut lines, &dims, true)?;
    if let Some((n, tokens)) = lines.next() {
        return Err(err(n, format!("unexpected '{}' after body", tokens[0])));
    }
    Ok(Document { dims, body, body_line })
}

fn parse_body(lines: &mut Lines<'_>, dims: &SystemDims, allow_mixed: bool) -> Result<Body, ParseError> {
    let (n, tokens) = lines.expect("'pure', 'matrix', 'product' or 'mixed'")?;
    arity(n, &tokens, 1)?;
    match tokens[0] {
        "pure" => parse_pure(lines, dims, n),
        "matrix" => parse_matrix(lines, dims.total()),
        "product" => parse_product(lines, dims, n),
        "mixed" if allow_mixed => parse_mixed(lines, dims, n),
        "mixed" => Err(err(n, "'mixed' cannot be nested")),
        other => Err(err(n, format!("unknown body '{other}'"))),
    }
}

fn parse_pure(lines: &mut Lines<'_>, dims: &SystemDims, start: usize) -> Result<Body, ParseError> {
    let mut amps = Vec::new();
    let mut seen = std::collections::HashSet::new();
    while lines.peek_keyword() == Some("amp") {
        let (n, tokens) = lines.next().expect("peeked");
        arity(n, &tokens, 4)?;
        let digits = parse_digits(n, tokens[1], dims)?;
        if !seen.insert(digits.clone()) {
            return Err(err(n, format!("duplicate amplitude for '{}'", tokens[1])));
        }
        amps.push((digits, C64::new(real(n, tokens[2])?, real(n, tokens[3])?)));
    }
    if amps.is_empty() {
        return Err(err(start, "'pure' needs at least one 'amp' line"));
    }
    Ok(Body::Pure(amps))
}

fn parse_digits(line: usize, token: &str, dims: &SystemDims) -> Result<Vec<usize>, ParseError> {
    if token.chars().count() != dims.parties() {
        return Err(err(line, format!("basis label '{token}' needs {} digits", dims.parties())));
    }
    token
        .chars()
        .enumerate()
        .map(|(party, ch)| {
            let d = ch.to_digit(36).ok_or_else(|| err(line, format!("invalid digit '{ch}'")))? as usize;
            if d >= dims.local(party) {
                return Err(err(line, format!("digit {d} out of range for subsystem {party} of dimension {}", dims.local(party))));
            }
            Ok(d)
        })
        .collect()
}

fn parse_matrix(lines: &mut Lines<'_>, side: usize) -> Result<Body, ParseError> {
    let mut entries = Vec::with_capacity(side * side);
    for row in 0..side {
        let (n, tokens) = lines.expect(&format!("matrix row {}", row + 1))?;
        if tokens.len() != 2 * side {
            return Err(err(n, format!("matrix row needs {} reals, found {}", 2 * side, tokens.len())));
        }
        for pair in tokens.chunks(2) {
            entries.push(C64::new(real(n, pair[0])?, real(n, pair[1])?));
        }
    }
    Ok(Body::Matrix(entries))
}

fn parse_product(lines: &mut Lines<'_>, dims: &SystemDims, start: usize) -> Result<Body, ParseError> {
    let mut factors = Vec::new();
    while lines.peek_keyword() == Some("factor") {
        let (n, tokens) = lines.next().expect("peeked");
        arity(n, &tokens, 2)?;
        let party = factors.len();
        if party >= dims.parties() {
            return Err(err(n, format!("more factors than the {} subsystems", dims.parties())));
        }
        let d: usize = tokens[1].parse().map_err(|_| err(n, format!("invalid dimension '{}'", tokens[1])))?;
        if d != dims.local(party) {
            return Err(err(n, format!("factor {party} has dimension {d}, expected {}", dims.local(party))));
        }
        let local = SystemDims::new(vec![d]).map_err(|e| err(n, e.to_string()))?;
        let body = parse_body(lines, &local, false)?;
        if matches!(body, Body::Product(_)) {
            return Err(err(n, "a factor body must be 'pure' or 'matrix'"));
        }
        factors.push(body);
    }
    if factors.len() != dims.parties() {
        return Err(err(start, format!("'product' needs {} factors, found {}", dims.parties(), factors.len())));
    }
    Ok(Body::Product(factors))
}

fn parse_cut(line: usize, token: &str, dims: &SystemDims) -> Result<usize, ParseError> {
    let solo: usize = token.parse().map_err(|_| err(line, format!("invalid cut index '{token}'")))?;
    if solo >= dims.parties() {
        return Err(err(line, format!("cut index {solo} out of range for {} subsystems", dims.parties())));
    }
    Ok(solo)
}

fn parse_mixed(lines: &mut Lines<'_>, dims: &SystemDims, start: usize) -> Result<Body, ParseError> {
    let mut components = Vec::new();
    while lines.peek_keyword() == Some("component") {
        let (n, tokens) = lines.next().expect("peeked");
        let mut cut = match tokens.len() {
            2 => None,
            4 if tokens[2] == "cut" => Some(parse_cut(n, tokens[3], dims)?),
            _ => return Err(err(n, "expected 'component <p>' or 'component <p> cut <i>'")),
        };
        let weight = real(n, tokens[1])?;
        if lines.peek_keyword() == Some("cut") {
            let (m, t) = lines.next().expect("peeked");
            arity(m, &t, 2)?;
            if cut.is_some() {
                return Err(err(m, "cut given twice"));
            }
            cut = Some(parse_cut(m, t[1], dims)?);
        }
        let body = parse_body(lines, dims, false)?;
        let (m, t) = lines.expect("'end'")?;
        if t != ["end"] {
            return Err(err(m, format!("expected 'end', found '{}'", t.join(" "))));
        }
        components.push(ComponentSpec { weight, cut, body, line: n });
    }
    if components.is_empty() {
        return Err(err(start, "'mixed' needs at least one component"));
    }
    Ok(Body::Mixed(components))
}

/// Failure to turn a well-formed document into a physical state.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {source}")]
pub struct BuildError {
    pub line: usize,
    #[source]
    pub source: DetectError,
}

fn build_state(body: &Body, dims: &SystemDims, line: usize) -> Result<QuantumState, BuildError> {
    let wrap = |e: StateError| BuildError { line, source: e.into() };
    match body {
        Body::Pure(amps) => {
            let mut v = vec![C64::new(0.0, 0.0); dims.total()];
            for (digits, a) in amps {
                v[dims.flat_index(digits)] = *a;
            }
            QuantumState::make_pure(&v, dims.clone()).map_err(wrap)
        }
        Body::Matrix(entries) => {
            let m = DMatrix::from_row_major(entries.clone()).map_err(wrap)?;
            QuantumState::from_matrix(m, dims.clone(), Validation::default()).map_err(wrap)
        }
        Body::Product(factors) => Ok(build_product(1.0, factors, dims, line)?.state().clone()),
        Body::Mixed(_) => {
            let d = build_decomposition(body, dims, line)?;
            Ok(d.assemble())
        }
    }
}

fn build_product(weight: f64, factors: &[Body], dims: &SystemDims, line: usize) -> Result<Component, BuildError> {
    let states = factors
        .iter()
        .enumerate()
        .map(|(party, f)| build_state(f, &dims.select(&[party]), line))
        .collect::<Result<Vec<_>, _>>()?;
    Component::product(weight, states).map_err(|source| BuildError { line, source })
}

fn build_component(spec: &ComponentSpec, dims: &SystemDims) -> Result<Component, BuildError> {
    let line = spec.line;
    let mut c = match &spec.body {
        Body::Product(factors) => build_product(spec.weight, factors, dims, line)?,
        other => Component::untagged(spec.weight, build_state(other, dims, line)?),
    };
    if let Some(solo) = spec.cut {
        let cut = Cut::new(solo, dims.parties()).map_err(|source| BuildError { line, source })?;
        c = c.with_cut(cut);
    }
    Ok(c)
}

fn build_decomposition(body: &Body, dims: &SystemDims, line: usize) -> Result<Decomposition, BuildError> {
    let components = match body {
        Body::Mixed(specs) => specs.iter().map(|s| build_component(s, dims)).collect::<Result<Vec<_>, _>>()?,
        Body::Product(factors) => vec![build_product(1.0, factors, dims, line)?],
        other => vec![Component::untagged(1.0, build_state(other, dims, line)?)],
    };
    Decomposition::new(components).map_err(|source| BuildError { line, source })
}

impl Document {
    /// The density matrix described by the document; a `mixed` body is summed.
    pub fn state(&self) -> Result<QuantumState, BuildError> {
        build_state(&self.body, &self.dims, self.body_line)
    }

    /// The document as an ensemble. A `pure` or `matrix` body becomes one
    /// untagged component and a top-level `product` one product component.
    pub fn decomposition(&self) -> Result<Decomposition, BuildError> {
        build_decomposition(&self.body, &self.dims, self.body_line)
    }
}

fn fmt_real(x: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{x:.16e}")
}

fn header(dims: &SystemDims) -> String {
    let d: Vec<String> = dims.as_slice().iter().map(|d| d.to_string()).collect();
    format!("qstate v1\ndims {}\n", d.join(" "))
}

fn write_matrix_body(out: &mut String, m: &DMatrix) {
    out.push_str("matrix\n");
    for i in 0..m.side() {
        let row: Vec<String> = m.row(i).iter().map(|z| format!("{} {}", fmt_real(z.re), fmt_real(z.im))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Serializes a state as a `matrix` body.
pub fn write_matrix(state: &QuantumState) -> String {
    let mut out = header(state.dims());
    write_matrix_body(&mut out, state.matrix());
    out
}

/// Serializes a state vector as a `pure` body, skipping zero amplitudes.
pub fn write_pure(amplitudes: &[C64], dims: &SystemDims) -> String {
    let mut out = header(dims);
    out.push_str("pure\n");
    for (i, a) in amplitudes.iter().enumerate() {
        if *a != C64::new(0.0, 0.0) {
            let label: String = dims
                .digits(i)
                .iter()
                .map(|&d| char::from_digit(d as u32, 36).expect("local dims below 36"))
                .collect();
            let _ = writeln!(out, "amp {label} {} {}", fmt_real(a.re), fmt_real(a.im));
        }
    }
    out
}

/// Serializes a decomposition as a `mixed` body with `matrix` or `product`
/// components.
pub fn write_decomposition(d: &Decomposition) -> String {
    let mut out = header(d.dims());
    out.push_str("mixed\n");
    for c in d.components() {
        let _ = write!(out, "component {}", fmt_real(c.weight()));
        if let Some(cut) = c.cut() {
            let _ = write!(out, " cut {}", cut.solo());
        }
        out.push('\n');
        match c.factors() {
            Some(factors) => {
                out.push_str("product\n");
                for f in factors {
                    let _ = writeln!(out, "factor {}", f.side());
                    write_matrix_body(&mut out, f.matrix());
                }
            }
            None => write_matrix_body(&mut out, c.state().matrix()),
        }
        out.push_str("end\n");
    }
    out
}
