//! Left/right side tables for the approximation bounds.
//!
//! Each [`BoundCase`] fixes a statement, a fixture, a matrix and the
//! exponents; [`Verifier::run`] produces one row `(n, LHS, RHS, LHS/RHS)` per
//! tested `n`. The bounds hold up to unknown constants, so a report is only
//! evidence of boundedness over a finite grid and a finite fixture family.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::apfun::{APFunction, PeriodicFunction};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::norms::{self, Measured, NormKind, NormSpace};
use crate::seqclass::{check_t1, gm2beta_constant, ms_check, MatrixKind, MatrixRow, SummabilityMatrix};
use crate::serde_util::inf_as_string;
use crate::summation::{self, GammaSequence};

/// `RHS = 0` requires `LHS <= CONSISTENCY_TOL * (amplitude bound of f)`.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statement {
    #[serde(rename = "prop1")]
    Prop1,
    #[serde(rename = "prop2")]
    Prop2,
    #[serde(rename = "thm2-E")]
    Thm2E,
    #[serde(rename = "thm2-omega")]
    Thm2Omega,
    #[serde(rename = "thm2-MS")]
    Thm2Ms,
    #[serde(rename = "thm4")]
    Thm4,
    #[serde(rename = "thm5")]
    Thm5,
    #[serde(rename = "thm6")]
    Thm6,
    #[serde(rename = "thm3-baseline")]
    Thm3Baseline,
    #[serde(rename = "remark7")]
    Remark7,
}

impl Statement {
    pub const ALL: [Statement; 10] = [
        Statement::Prop1,
        Statement::Prop2,
        Statement::Thm2E,
        Statement::Thm2Omega,
        Statement::Thm2Ms,
        Statement::Thm4,
        Statement::Thm5,
        Statement::Thm6,
        Statement::Thm3Baseline,
        Statement::Remark7,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Statement::Prop1 => "prop1",
            Statement::Prop2 => "prop2",
            Statement::Thm2E => "thm2-E",
            Statement::Thm2Omega => "thm2-omega",
            Statement::Thm2Ms => "thm2-MS",
            Statement::Thm4 => "thm4",
            Statement::Thm5 => "thm5",
            Statement::Thm6 => "thm6",
            Statement::Thm3Baseline => "thm3-baseline",
            Statement::Remark7 => "remark7",
        }
    }

    /// Statements measured in `C_{2π}` on the periodic form of the fixture.
    pub fn is_periodic(self) -> bool {
        matches!(self, Statement::Thm2E | Statement::Thm2Omega | Statement::Thm2Ms)
    }

    fn uses_matrix(self) -> bool {
        !matches!(self, Statement::Prop1 | Statement::Prop2)
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statement::ALL
            .into_iter()
            .find(|st| st.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let ids: Vec<&str> = Statement::ALL.iter().map(|s| s.id()).collect();
                Error::InvalidArguments(format!("unknown statement {s:?}; expected one of {}", ids.join(", ")))
            })
    }
}

/// Which computable upper bound stands in for `E_σ(f)_{S^p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Majorant {
    /// `‖f - S_σ f‖`.
    Truncation,
    /// `ω f(1/σ)`.
    Jackson,
}

impl Majorant {
    pub fn id(self) -> &'static str {
        match self {
            Majorant::Truncation => "truncation",
            Majorant::Jackson => "jackson",
        }
    }
}

impl FromStr for Majorant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncation" => Ok(Majorant::Truncation),
            "jackson" => Ok(Majorant::Jackson),
            _ => Err(Error::InvalidArguments(format!("unknown majorant {s:?}; expected truncation or jackson"))),
        }
    }
}

/// One verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCase {
    pub statement: Statement,
    pub fixture: Fixture,
    pub matrix: SummabilityMatrix,
    /// Stepanov exponent; ignored by the periodic statements.
    pub p: f64,
    pub q: f64,
    pub c: f64,
    pub n_start: usize,
    pub n_end: usize,
    pub majorant: Majorant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub ratio: f64,
    pub lhs_tolerance: f64,
    pub rhs_tolerance: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub running_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub consistency: f64,
    pub window_refine: f64,
    pub equioscillation: f64,
    pub invariant: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            consistency: CONSISTENCY_TOL,
            window_refine: norms::WINDOW_REFINE_TOL,
            equioscillation: norms::remez::EQUIOSCILLATION_TOL,
            invariant: crate::apfun::INVARIANT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub statement: String,
    pub fixture: String,
    pub matrix: String,
    /// `uniform-periodic` or `stepanov`.
    pub space: String,
    #[serde(serialize_with = "inf_as_string")]
    pub p: f64,
    pub q: f64,
    pub c: f64,
    pub majorant: String,
    pub n_start: usize,
    pub n_end: usize,
    pub rows: Vec<BoundRow>,
    #[serde(serialize_with = "inf_as_string")]
    pub sup_ratio: f64,
    /// `‖f‖_{S^∞}` for the comparison statements.
    pub reference_norm: Option<f64>,
    pub tolerances: Tolerances,
    /// Bound-consistency violations; empty on success.
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn is_consistent(&self) -> bool {
        self.flags.is_empty()
    }

    /// Largest ratio over rows with `n <= n_max`.
    pub fn sup_ratio_upto(&self, n_max: usize) -> f64 {
        self.rows.iter().filter(|r| r.n <= n_max).map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub const CSV_HEADER: &str = "statement,n,lhs,rhs,ratio";

/// Twelve significant digits; non-finite values as `inf`/`nan`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

/// CSV table for several reports under one header.
pub fn to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for row in &r.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.statement,
                row.n,
                format_number(row.lhs),
                format_number(row.rhs),
                format_number(row.ratio)
            );
        }
    }
    out
}

/// Joins CSV tables that share [`CSV_HEADER`], keeping their order.
pub fn merge_csv(tables: &[String]) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, t) in tables.iter().enumerate() {
        let mut lines = t.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::Schema(format!("table {} does not start with `{CSV_HEADER}`", i + 1))),
        }
        for l in lines.filter(|l| !l.trim().is_empty()) {
            if l.split(',').count() != 5 {
                return Err(Error::Schema(format!("table {}: malformed row {l:?}", i + 1)));
            }
            out.push_str(l);
            out.push('\n');
        }
    }
    Ok(out)
}

fn space_key(space: &NormSpace) -> u64 {
    match space.kind {
        NormKind::UniformPeriodic => 0,
        NormKind::Stepanov { p } => p.to_bits(),
    }
}

/// Runs cases, caching majorant values across runs.
#[derive(Debug, Default)]
pub struct Verifier {
    tails: BTreeMap<(String, u64, usize), Measured>,
    moduli: BTreeMap<(String, u64, u64), Measured>,
    remez: BTreeMap<(String, usize), Measured>,
    norms: BTreeMap<(String, u64), Measured>,
}

fn fingerprint(f: &APFunction) -> String {
    format!("{f:?}")
}

/// `{sum_k a_k m_k^q}^{1/q}` and the weighted tolerance.
fn weighted_mean(row: &MatrixRow, q: f64, mut m: impl FnMut(usize) -> Result<Measured>) -> Result<Measured> {
    let mut s = 0.0;
    let mut tol = 0.0;
    for (k, a) in row.entries() {
        let v = m(k)?;
        s += a * v.value.powf(q);
        tol += a * v.tolerance;
    }
    Ok(Measured {
        value: s.powf(1.0 / q),
        tolerance: tol,
    })
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    fn norm(&mut self, f: &APFunction, space: &NormSpace) -> Result<Measured> {
        let key = (fingerprint(f), space_key(space));
        if let Some(v) = self.norms.get(&key) {
            return Ok(*v);
        }
        let v = norms::norm_in(f, space, norms::default_u_span(f))?;
        self.norms.insert(key, v);
        Ok(v)
    }

    /// Truncation bound `‖f - S_σ f‖`, cached by the number of kept terms.
    fn truncation(&mut self, f: &APFunction, sigma: f64, space: &NormSpace) -> Result<Measured> {
        let kept = f.count_within(sigma);
        if kept == f.terms().len() {
            return Ok(Measured::exact(0.0));
        }
        let key = (fingerprint(f), space_key(space), kept);
        if let Some(v) = self.tails.get(&key) {
            return Ok(*v);
        }
        let v = norms::best_approx_stepanov_upper(f, sigma, space)?;
        self.tails.insert(key, v);
        Ok(v)
    }

    fn modulus(&mut self, f: &APFunction, delta: f64, space: &NormSpace) -> Result<Measured> {
        let key = (fingerprint(f), space_key(space), delta.to_bits());
        if let Some(v) = self.moduli.get(&key) {
            return Ok(*v);
        }
        let v = norms::modulus(f, delta, space)?;
        self.moduli.insert(key, v);
        Ok(v)
    }

    fn best_periodic(&mut self, f: &PeriodicFunction, k: usize) -> Result<Measured> {
        let k = k.min(f.degree());
        let key = (fingerprint(&f.to_ap()), k);
        if let Some(v) = self.remez.get(&key) {
            return Ok(*v);
        }
        let v = norms::best_approx_periodic(f, k)?;
        self.remez.insert(key, v);
        Ok(v)
    }

    /// The chosen majorant for `E_σ(f)`; Jackson falls back to truncation
    /// at `σ = 0`, where `ω f(1/σ)` is undefined.
    fn e_sigma(&mut self, f: &APFunction, sigma: f64, space: &NormSpace, majorant: Majorant) -> Result<(Measured, bool)> {
        match majorant {
            Majorant::Truncation => Ok((self.truncation(f, sigma, space)?, false)),
            Majorant::Jackson if sigma > 0.0 => {
                if f.is_constant() {
                    return Ok((Measured::exact(0.0), false));
                }
                Ok((self.modulus(f, 1.0 / sigma, space)?, false))
            }
            Majorant::Jackson => Ok((self.truncation(f, sigma, space)?, true)),
        }
    }

    pub fn run(&mut self, case: &BoundCase) -> Result<BoundReport> {
        let st = case.statement;
        if !(case.q > 0.0) || !case.q.is_finite() {
            return Err(Error::InvalidExponent(case.q));
        }
        if !(case.c > 1.0) || !case.c.is_finite() {
            return Err(Error::InvalidC(case.c));
        }
        if case.n_end < case.n_start {
            return Err(Error::InvalidArguments(format!("empty n range {}..{}", case.n_start, case.n_end)));
        }
        let f = &case.fixture.function;
        let alpha = f.alpha();
        let q = case.q;
        let space = if st.is_periodic() {
            NormSpace::uniform()
        } else {
            NormSpace::stepanov(case.p)?
        };
        let mut notes = vec![
            "coverage: one fixture and a finite n grid; bounded ratios are evidence, not proof".to_string(),
        ];

        let rows_a: Vec<MatrixRow> = if st.uses_matrix() {
            (case.n_start..=case.n_end).map(|n| case.matrix.row(n)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        self.check_hypotheses(case, &rows_a, &mut notes)?;

        let periodic = if st.is_periodic() {
            Some(case.fixture.periodic().map_err(|e| {
                Error::HypothesisViolation(format!("{} needs a periodic fixture: {e}", st.id()))
            })?)
        } else {
            None
        };
        let gammas = GammaSequence::half_alpha(alpha)?;
        let unit = GammaSequence::linear(1.0)?;
        let shrink = 2f64.powi(case.c.floor() as i32);
        let mut jackson_fallback = false;
        let mut reference_norm = None;
        let mut rows = Vec::new();

        for n in case.n_start..=case.n_end {
            let (lhs, rhs) = match st {
                Statement::Prop1 | Statement::Prop2 => {
                    if n == 0 {
                        continue;
                    }
                    let r = n.div_ceil(2);
                    let row = MatrixRow::block(n, n - r, n)?;
                    let lhs = summation::strong_mean_norm(f, &row, &gammas, q, &space)?;
                    let rhs = if st == Statement::Prop1 {
                        self.norm(f, &space)?
                    } else {
                        let (e, fb) = self.e_sigma(f, alpha * (n - r) as f64 / 2.0, &space, case.majorant)?;
                        jackson_fallback |= fb;
                        e
                    };
                    (lhs, rhs)
                }
                Statement::Thm4 | Statement::Thm5 | Statement::Thm6 => {
                    let row = &rows_a[n - case.n_start];
                    let lhs = summation::strong_mean_norm(f, row, &gammas, q, &space)?;
                    let rhs = weighted_mean(row, q, |k| match st {
                        Statement::Thm5 => self.modulus(f, PI / (k + 1) as f64, &space),
                        _ => {
                            let sigma = if st == Statement::Thm4 {
                                alpha * k as f64 / (shrink + 1.0)
                            } else {
                                alpha * k as f64 / 2.0
                            };
                            let (e, fb) = self.e_sigma(f, sigma, &space, case.majorant)?;
                            jackson_fallback |= fb;
                            Ok(e)
                        }
                    })?;
                    (lhs, rhs)
                }
                Statement::Thm2E | Statement::Thm2Omega | Statement::Thm2Ms => {
                    let fp = periodic.as_ref().expect("periodic form checked above");
                    let row = &rows_a[n - case.n_start];
                    let lhs = summation::strong_mean_norm(f, row, &unit, q, &space)?;
                    let rhs = weighted_mean(row, q, |k| match st {
                        Statement::Thm2E => self.best_periodic(fp, (k as f64 / shrink).floor() as usize),
                        Statement::Thm2Ms => self.best_periodic(fp, k),
                        _ => {
                            if f.is_constant() {
                                Ok(Measured::exact(0.0))
                            } else {
                                self.modulus(f, PI / (k + 1) as f64, &space)
                            }
                        }
                    })?;
                    (lhs, rhs)
                }
                Statement::Thm3Baseline | Statement::Remark7 => {
                    let row = &rows_a[n - case.n_start];
                    let norm = self.norm(f, &space)?;
                    reference_norm = Some(norm.value);
                    let new = weighted_mean(row, q, |k| {
                        if f.is_constant() {
                            Ok(Measured::exact(0.0))
                        } else {
                            self.modulus(f, PI / (k + 1) as f64, &space)
                        }
                    })?;
                    let old = Measured {
                        value: new.value + norm.value / ((n + 1) as f64).powf(1.0 / q),
                        tolerance: new.tolerance + norm.tolerance,
                    };
                    if st == Statement::Remark7 {
                        (new, old)
                    } else {
                        (summation::strong_mean_norm(f, row, &gammas, q, &space)?, old)
                    }
                }
            };
            rows.push((n, lhs, rhs));
        }

        let zero_tol = CONSISTENCY_TOL * f.amplitude_bound();
        let mut flags = Vec::new();
        let mut running = 0.0f64;
        let rows: Vec<BoundRow> = rows
            .into_iter()
            .map(|(n, lhs, rhs)| {
                let ratio = if rhs.value == 0.0 {
                    if lhs.value <= zero_tol {
                        0.0
                    } else {
                        flags.push(format!("n = {n}: RHS = 0 but LHS = {}", format_number(lhs.value)));
                        f64::INFINITY
                    }
                } else {
                    lhs.value / rhs.value
                };
                running = running.max(ratio);
                BoundRow {
                    n,
                    lhs: lhs.value,
                    rhs: rhs.value,
                    ratio,
                    lhs_tolerance: lhs.tolerance,
                    rhs_tolerance: rhs.tolerance,
                    running_sup: running,
                }
            })
            .collect();

        if jackson_fallback {
            notes.push("jackson majorant replaced by truncation at sigma = 0".into());
        }
        match st {
            Statement::Thm6 => notes.push(
                "right side uses E^q at sigma = alpha k / 2 inside the sum, the form reached at the end of the proof; the printed statement shows E_k^p"
                    .into(),
            ),
            Statement::Thm4 => notes.push(format!("right side uses E at sigma = alpha k / (2^[c] + 1) with [c] = {}", case.c.floor())),
            Statement::Thm2E | Statement::Thm2Ms => notes.push("right side uses best uniform approximations from the exchange iteration".into()),
            Statement::Prop1 | Statement::Prop2 => notes.push("r_n = ceil(n/2); n = 0 has an empty block and is skipped".into()),
            Statement::Remark7 => notes.push("lhs = new right side, rhs = old right side (unit constants)".into()),
            Statement::Thm3Baseline => notes.push("rhs = old right side with unit constants".into()),
            _ => {}
        }
        let majorant = match st {
            Statement::Prop2 | Statement::Thm4 | Statement::Thm6 => case.majorant.id(),
            Statement::Thm2E | Statement::Thm2Ms => "best-uniform",
            Statement::Prop1 => "norm",
            _ => "modulus",
        };
        Ok(BoundReport {
            statement: st.id().into(),
            fixture: case.fixture.name.clone(),
            matrix: if st.uses_matrix() { case.matrix.name() } else { "block-ceil-half".into() },
            space: match space.kind {
                NormKind::UniformPeriodic => "uniform-periodic".into(),
                NormKind::Stepanov { .. } => "stepanov".into(),
            },
            p: space.exponent(),
            q,
            c: case.c,
            majorant: majorant.into(),
            n_start: case.n_start,
            n_end: case.n_end,
            sup_ratio: running,
            rows,
            reference_norm,
            tolerances: Tolerances::default(),
            flags,
            notes,
        })
    }

    fn check_hypotheses(&self, case: &BoundCase, rows: &[MatrixRow], notes: &mut Vec<String>) -> Result<()> {
        let st = case.statement;
        let violation = |m: String| Err(Error::HypothesisViolation(format!("{}: {m}", st.id())));
        if let Some(r) = rows.iter().find(|r| !check_t1(r)) {
            return violation(format!("row {} sums to {} instead of 1", r.n(), r.sum()));
        }
        match st {
            Statement::Thm4 | Statement::Thm5 | Statement::Thm2E | Statement::Thm2Omega => {
                for r in rows {
                    if !gm2beta_constant(r, case.c)?.is_finite() {
                        return violation(format!("row {} fails the GM(2beta) condition with c = {}", r.n(), case.c));
                    }
                }
                if rows.len() > 1 {
                    let first = rows[0].weight(0);
                    let last = rows[rows.len() - 1].weight(0);
                    if !(last < first) {
                        return violation(format!("a_(n,0) does not decay ({first} then {last})"));
                    }
                } else {
                    notes.push("single row: decay of a_(n,0) not observable".into());
                }
            }
            Statement::Thm6 | Statement::Thm2Ms => {
                if let Some(r) = rows.iter().find(|r| !ms_check(r)) {
                    return violation(format!("row {} is not nonincreasing", r.n()));
                }
            }
            Statement::Thm3Baseline | Statement::Remark7 => {
                if case.p != f64::INFINITY {
                    return violation(format!("needs p = inf, got {}", case.p));
                }
                if case.q < 2.0 {
                    return violation(format!("needs q >= 2, got {}", case.q));
                }
                if case.matrix.kind() != &MatrixKind::Cesaro {
                    return violation(format!("needs the Cesaro matrix, got {}", case.matrix.name()));
                }
            }
            Statement::Prop1 | Statement::Prop2 => {}
        }
        if matches!(st, Statement::Thm4 | Statement::Thm5 | Statement::Thm6) && case.p < case.q {
            return violation(format!("needs p >= q, got p = {} and q = {}", case.p, case.q));
        }
        Ok(())
    }
}
