//! Run configuration: a TOML file whose keys mirror the command-line flags.
//! Flags override file values; unset keys take the defaults below.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const DEFAULT_MATRIX: &str = "cesaro";
pub const DEFAULT_FIXTURE: &str = "sine";
pub const DEFAULT_P: f64 = f64::INFINITY;
pub const DEFAULT_Q: f64 = 2.0;
pub const DEFAULT_C: f64 = 2.0;
pub const DEFAULT_N: &str = "0..64";
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAJORANT: &str = "truncation";

/// Stepanov exponent as written: a number, `inf`, or `uniform` for `C_{2π}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub matrix: Option<String>,
    pub fixture: Option<String>,
    pub p: Option<PValue>,
    pub q: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<String>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub statement: Option<String>,
    pub majorant: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("schema error in config {}", path.display()))
    }
}

/// `None` stands for the uniform norm on the circle.
pub fn parse_p(v: &PValue) -> Result<Option<f64>> {
    let p = match v {
        PValue::Number(p) => *p,
        PValue::Text(s) if s == "uniform" => return Ok(None),
        PValue::Text(s) => s.parse::<f64>().with_context(|| format!("bad exponent p = {s:?}"))?,
    };
    if !(p > 1.0) {
        bail!("p must exceed 1, got {p}");
    }
    Ok(Some(p))
}

/// `a..b` and `a..=b` (both inclusive of `b`) or a single index.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let s = s.trim();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().with_context(|| format!("bad range {s:?}"))?;
    let b: usize = b.trim().parse().with_context(|| format!("bad range {s:?}"))?;
    if b < a {
        bail!("range {s:?} is empty");
    }
    Ok((a, b))
}
