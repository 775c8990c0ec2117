//! Summability-matrix rows and the sequence class checkers.
//!
//! Every checker computes the minimal constant `K` that makes its defining
//! inequality hold over the finite support of a row. The ratio `0/0` counts
//! as `0`; a positive left side over a vanishing right side makes `K`
//! infinite. A finite constant is a certificate that no violation was found
//! up to the tested bounds, nothing more.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::apfun::INVARIANT_TOL;
use crate::error::{Error, Result};
use crate::serde_util::inf_as_string;

/// Row `n` of a summability matrix: weights `a_{n,k}` for `k = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRow {
    n: usize,
    weights: Vec<f64>,
}

impl MatrixRow {
    /// Trailing zeros are trimmed; weights must be finite and nonnegative.
    pub fn new(n: usize, mut weights: Vec<f64>) -> Result<Self> {
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArguments(format!("row {n}: weight a_{k} = {w} is not a finite nonnegative number")));
        }
        while weights.last() == Some(&0.0) {
            weights.pop();
        }
        Ok(Self { n, weights })
    }

    /// Builds a row from sparse `(k, weight)` pairs; repeated indices add up.
    pub fn from_sparse(n: usize, entries: &[(usize, f64)]) -> Result<Self> {
        let len = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let mut weights = vec![0.0; len];
        for &(k, w) in entries {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArguments(format!("row {n}: weight a_{k} = {w} is not a finite nonnegative number")));
            }
            weights[k] += w;
        }
        Self::new(n, weights)
    }

    /// Unit mass at `k0`.
    pub fn unit(n: usize, k0: usize) -> Self {
        let mut weights = vec![0.0; k0 + 1];
        weights[k0] = 1.0;
        Self { n, weights }
    }

    /// Equal weights `1/(end - start)` on `start..end`.
    pub fn block(n: usize, start: usize, end: usize) -> Result<Self> {
        if end <= start {
            return Err(Error::InvalidArguments(format!("empty block {start}..{end}")));
        }
        let w = 1.0 / (end - start) as f64;
        let weights = (0..end).map(|k| if k >= start { w } else { 0.0 }).collect();
        Self::new(n, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `a_{n,k}`, zero beyond the support.
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    /// One past the last nonzero index.
    pub fn support_end(&self) -> usize {
        self.weights.len()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Nonzero `(k, a_{n,k})` pairs in increasing `k`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate().filter(|e| e.1 != 0.0)
    }

    /// `|a_k - a_{k+1}|` for `k = 0..len` (the last one is the drop to zero).
    fn differences(&self) -> Vec<f64> {
        (0..self.weights.len()).map(|k| (self.weight(k) - self.weight(k + 1)).abs()).collect()
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

fn max_ratio(profile: &[f64]) -> f64 {
    profile.iter().copied().fold(0.0, f64::max)
}

/// The row sums to one within `1e-12`.
pub fn check_t1(row: &MatrixRow) -> bool {
    (row.sum() - 1.0).abs() <= INVARIANT_TOL
}

/// The weights are nonincreasing, trailing zeros included.
pub fn ms_check(row: &MatrixRow) -> bool {
    row.weights.windows(2).all(|w| w[0] >= w[1])
}

/// Per-`m` ratios `sum_{k>=m} |a_k - a_{k+1}| / a_m` for `m = 0..len`.
pub fn rbvs_profile(row: &MatrixRow) -> Vec<f64> {
    let d = row.differences();
    let mut tail = vec![0.0; d.len() + 1];
    for k in (0..d.len()).rev() {
        tail[k] = tail[k + 1] + d[k];
    }
    (0..d.len()).map(|m| ratio(tail[m], row.weight(m))).collect()
}

pub fn rbvs_constant(row: &MatrixRow) -> f64 {
    max_ratio(&rbvs_profile(row))
}

/// Per-`m` ratios against the mean `(1/m) sum_{m/2 <= k <= m} a_k`, `m = 1..=len`.
pub fn mrbvs_profile(row: &MatrixRow) -> Vec<f64> {
    let d = row.differences();
    let len = row.support_end();
    let mut tail = vec![0.0; len + 1];
    for k in (0..len).rev() {
        tail[k] = tail[k + 1] + d[k];
    }
    let prefix = prefix_sums(len + 1, |k| row.weight(k));
    (1..=len)
        .map(|m| {
            let lo = m.div_ceil(2);
            let mean = (prefix[m + 1] - prefix[lo]) / m as f64;
            ratio(tail[m], mean)
        })
        .collect()
}

pub fn mrbvs_constant(row: &MatrixRow) -> f64 {
    max_ratio(&mrbvs_profile(row))
}

fn prefix_sums(len: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 0..len {
        acc += f(k);
        out.push(acc);
    }
    out
}

/// `sum_{k=m}^{2m-1} |a_k - a_{k+1}|` for `m = 1..=len`, index `m - 1`.
fn block_variations(row: &MatrixRow) -> Vec<f64> {
    let len = row.support_end();
    let d = row.differences();
    let prefix = prefix_sums(2 * len + 1, |k| d.get(k).copied().unwrap_or(0.0));
    (1..=len).map(|m| prefix[2 * m] - prefix[m]).collect()
}

/// Ratio of the block variation over `a_m` at one `m >= 1`.
pub fn gm_ratio(row: &MatrixRow, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let lhs: f64 = (m..2 * m).map(|k| (row.weight(k) - row.weight(k + 1)).abs()).sum();
    ratio(lhs, row.weight(m))
}

pub fn gm_profile(row: &MatrixRow) -> Vec<f64> {
    block_variations(row)
        .iter()
        .enumerate()
        .map(|(i, &lhs)| ratio(lhs, row.weight(i + 1)))
        .collect()
}

pub fn gm_constant(row: &MatrixRow) -> f64 {
    max_ratio(&gm_profile(row))
}

/// Per-`m` ratios of the block variation over `sum_{k=[m/c]}^{[cm]} a_k / k`,
/// with the lower index raised to 1.
pub fn gm2beta_profile(row: &MatrixRow, c: f64) -> Result<Vec<f64>> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::InvalidC(c));
    }
    let len = row.support_end();
    let prefix = prefix_sums(len + 1, |k| if k == 0 { 0.0 } else { row.weight(k) / k as f64 });
    let lhs = block_variations(row);
    Ok((1..=len)
        .map(|m| {
            let lo = ((m as f64 / c).floor() as usize).max(1);
            let hi = ((c * m as f64).floor() as usize).min(len);
            let rhs = if hi >= lo { prefix[hi + 1] - prefix[lo] } else { 0.0 };
            ratio(lhs[m - 1], rhs)
        })
        .collect())
}

pub fn gm2beta_constant(row: &MatrixRow, c: f64) -> Result<f64> {
    Ok(max_ratio(&gm2beta_profile(row, c)?))
}

/// Generator of matrix rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixKind {
    /// `a_{n,k} = 1/(n+1)` for `k <= n`.
    Cesaro,
    /// `a_{n,k} = p_k / P_n` for `k <= n` with `p_k = (k+1)^exponent`.
    Riesz { exponent: f64 },
    /// Explicit rows read from a file.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityMatrix {
    kind: MatrixKind,
    rows: BTreeMap<usize, MatrixRow>,
    n_range: Option<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    kind: String,
    #[serde(default)]
    exponent: Option<f64>,
    #[serde(default)]
    n_range: Option<[usize; 2]>,
    #[serde(default)]
    rows: Vec<RowFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    n: usize,
    entries: Vec<(usize, f64)>,
}

impl SummabilityMatrix {
    pub fn cesaro() -> Self {
        Self {
            kind: MatrixKind::Cesaro,
            rows: BTreeMap::new(),
            n_range: None,
        }
    }

    pub fn riesz(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidArguments(format!("Riesz exponent must be finite, got {exponent}")));
        }
        Ok(Self {
            kind: MatrixKind::Riesz { exponent },
            rows: BTreeMap::new(),
            n_range: None,
        })
    }

    pub fn custom(rows: Vec<MatrixRow>) -> Self {
        let rows: BTreeMap<usize, MatrixRow> = rows.into_iter().map(|r| (r.n, r)).collect();
        let n_range = match (rows.keys().next(), rows.keys().next_back()) {
            (Some(&a), Some(&b)) => Some((a, b)),
            _ => None,
        };
        Self {
            kind: MatrixKind::Custom,
            rows,
            n_range,
        }
    }

    /// `cesaro`, `riesz` (weights `k+1`) or `riesz:<exponent>`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.split_once(':') {
            None if name == "cesaro" => Ok(Self::cesaro()),
            None if name == "riesz" => Self::riesz(1.0),
            Some(("riesz", s)) => {
                let e: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidArguments(format!("bad Riesz exponent {s:?}")))?;
                Self::riesz(e)
            }
            _ => Err(Error::InvalidArguments(format!("unknown matrix {name:?}"))),
        }
    }

    /// Parses a matrix document (TOML). See the README for the schema.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: MatrixFile = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        match file.kind.as_str() {
            "cesaro" => Ok(Self::cesaro()),
            "riesz" => Self::riesz(file.exponent.unwrap_or(1.0)),
            "custom" => {
                if file.rows.is_empty() {
                    return Err(Error::Schema("custom matrix without rows".into()));
                }
                let mut rows = Vec::with_capacity(file.rows.len());
                for r in &file.rows {
                    rows.push(MatrixRow::from_sparse(r.n, &r.entries).map_err(|e| Error::Schema(e.to_string()))?);
                }
                let mut m = Self::custom(rows);
                if let Some([a, b]) = file.n_range {
                    if a > b {
                        return Err(Error::Schema(format!("n_range [{a}, {b}] is reversed")));
                    }
                    m.n_range = Some((a, b));
                }
                Ok(m)
            }
            other => Err(Error::Schema(format!("unknown matrix kind {other:?}"))),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArguments(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    /// Rows declared by a custom matrix; builtins have no fixed range.
    pub fn n_range(&self) -> Option<(usize, usize)> {
        self.n_range
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MatrixKind::Cesaro => "cesaro".into(),
            MatrixKind::Riesz { exponent } if *exponent == 1.0 => "riesz".into(),
            MatrixKind::Riesz { exponent } => format!("riesz:{exponent}"),
            MatrixKind::Custom => "custom".into(),
        }
    }

    pub fn row(&self, n: usize) -> Result<MatrixRow> {
        match &self.kind {
            MatrixKind::Cesaro => MatrixRow::new(n, vec![1.0 / (n + 1) as f64; n + 1]),
            MatrixKind::Riesz { exponent } => {
                let p: Vec<f64> = (0..=n).map(|k| ((k + 1) as f64).powf(*exponent)).collect();
                let total: f64 = p.iter().sum();
                MatrixRow::new(n, p.into_iter().map(|w| w / total).collect())
            }
            MatrixKind::Custom => self
                .rows
                .get(&n)
                .cloned()
                .ok_or_else(|| Error::InvalidArguments(format!("custom matrix has no row {n}"))),
        }
    }
}

/// Constants and flags for one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowReport {
    pub n: usize,
    pub t1: bool,
    pub ms: bool,
    #[serde(serialize_with = "inf_as_string")]
    pub rbvs: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub mrbvs: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub gm: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub gm2beta: f64,
    /// `a_{n,0}`.
    pub a_n0: f64,
}

/// Suprema of the per-row constants over the tested rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupConstants {
    #[serde(serialize_with = "inf_as_string")]
    pub rbvs: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub mrbvs: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub gm: f64,
    #[serde(serialize_with = "inf_as_string")]
    pub gm2beta: f64,
}

/// Membership over the tested rows: every row finite (or true for T1/MS).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassFlags {
    pub t1: bool,
    pub ms: bool,
    pub rbvs: bool,
    pub mrbvs: bool,
    pub gm: bool,
    pub gm2beta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub matrix: String,
    pub c: f64,
    pub n_start: usize,
    pub n_end: usize,
    pub rows: Vec<RowReport>,
    pub sup: SupConstants,
    pub flags: ClassFlags,
    /// `a_{n,0}` in ascending `n`.
    pub a_n0_decay: Vec<f64>,
    /// `a_{n,0}` at the last tested row is below its value at the first.
    pub a_n0_decreasing: bool,
    pub certificate: String,
}

pub fn classify_row(row: &MatrixRow, c: f64) -> Result<RowReport> {
    Ok(RowReport {
        n: row.n,
        t1: check_t1(row),
        ms: ms_check(row),
        rbvs: rbvs_constant(row),
        mrbvs: mrbvs_constant(row),
        gm: gm_constant(row),
        gm2beta: gm2beta_constant(row, c)?,
        a_n0: row.weight(0),
    })
}

/// Classifies rows `n_start..=n_end` in ascending order.
pub fn classify(matrix: &SummabilityMatrix, n_start: usize, n_end: usize, c: f64) -> Result<ClassReport> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::InvalidC(c));
    }
    if n_end < n_start {
        return Err(Error::InvalidArguments(format!("empty n range {n_start}..{n_end}")));
    }
    let mut rows = Vec::with_capacity(n_end - n_start + 1);
    for n in n_start..=n_end {
        rows.push(classify_row(&matrix.row(n)?, c)?);
    }
    let sup = |f: fn(&RowReport) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let sup = SupConstants {
        rbvs: sup(|r| r.rbvs),
        mrbvs: sup(|r| r.mrbvs),
        gm: sup(|r| r.gm),
        gm2beta: sup(|r| r.gm2beta),
    };
    let flags = ClassFlags {
        t1: rows.iter().all(|r| r.t1),
        ms: rows.iter().all(|r| r.ms),
        rbvs: sup.rbvs.is_finite(),
        mrbvs: sup.mrbvs.is_finite(),
        gm: sup.gm.is_finite(),
        gm2beta: sup.gm2beta.is_finite(),
    };
    let a_n0_decay: Vec<f64> = rows.iter().map(|r| r.a_n0).collect();
    let a_n0_decreasing = a_n0_decay.len() > 1 && a_n0_decay[a_n0_decay.len() - 1] < a_n0_decay[0];
    Ok(ClassReport {
        matrix: matrix.name(),
        c,
        n_start,
        n_end,
        rows,
        sup,
        flags,
        a_n0_decay,
        a_n0_decreasing,
        certificate: format!(
            "no violation found for rows {n_start}..={n_end} over their full support; finite checks only"
        ),
    })
}
