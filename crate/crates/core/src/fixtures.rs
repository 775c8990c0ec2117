//! Named test functions and the fixture document format.
//!
//! A fixture document is TOML. The almost periodic form lists signed
//! exponents with rectangular amplitudes:
//!
//! ```toml
//! name = "sine"
//! alpha = 1.0
//! real_valued = true
//! terms = [[1.0, 0.0, -0.5], [-1.0, 0.0, 0.5]]   # (frequency, re A, im A)
//! ```
//!
//! The periodic form gives `a_0` and the pairs `(a_nu, b_nu)`:
//!
//! ```toml
//! name = "lacunary"
//! kind = "periodic"
//! a0 = 0.0
//! pairs = [[0.0, 0.0], [0.25, 0.0]]
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::apfun::{APFunction, PeriodicFunction, INVARIANT_TOL};
use crate::error::{Error, Result};

/// A named function under test.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub function: APFunction,
}

impl Fixture {
    pub fn new(name: impl Into<String>, function: APFunction) -> Self {
        Self {
            name: name.into(),
            function,
        }
    }

    /// The same fixture multiplied by `c`; the name records the factor.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            name: format!("{}*{c}", self.name),
            function: self.function.scale(c),
        }
    }

    /// The periodic form, when every exponent is an integer and f is real.
    pub fn periodic(&self) -> Result<PeriodicFunction> {
        to_periodic(&self.function)
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["sine", "sine-quarter-4", "sine-half-3", "lacunary-cosine", "constant[:c]"];

/// `sine`, `sine-quarter-4`, `sine-half-3`, `lacunary-cosine`, `constant`
/// or `constant:<c>`.
pub fn builtin(name: &str) -> Result<Fixture> {
    let sine = |extra: &[(f64, f64, f64)]| {
        let mut pairs = vec![(1.0, 0.0, 1.0)];
        pairs.extend_from_slice(extra);
        APFunction::real_trig(1.0, 0.0, &pairs)
    };
    let f = match name {
        "sine" => sine(&[])?,
        "sine-quarter-4" => sine(&[(4.0, 0.0, 0.25)])?,
        "sine-half-3" => sine(&[(3.0, 0.0, 0.5)])?,
        "lacunary-cosine" => {
            let pairs: Vec<(f64, f64, f64)> = (1..=4).map(|j| ((1u32 << j) as f64, 0.5f64.powi(j), 0.0)).collect();
            APFunction::real_trig(1.0, 0.0, &pairs)?
        }
        "constant" => APFunction::constant(1.0),
        other => match other.strip_prefix("constant:") {
            Some(c) => {
                let c: f64 = c
                    .parse()
                    .map_err(|_| Error::InvalidArguments(format!("bad constant in fixture {other:?}")))?;
                if !c.is_finite() {
                    return Err(Error::InvalidArguments(format!("bad constant in fixture {other:?}")));
                }
                APFunction::constant(c)
            }
            None => {
                return Err(Error::InvalidArguments(format!(
                    "unknown fixture {other:?}; builtins are {}",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        },
    };
    Ok(Fixture::new(name, f))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    real_valued: Option<bool>,
    #[serde(default)]
    terms: Vec<(f64, f64, f64)>,
    #[serde(default)]
    a0: Option<f64>,
    #[serde(default)]
    pairs: Vec<(f64, f64)>,
}

pub fn from_toml_str(text: &str, default_name: &str) -> Result<Fixture> {
    let file: FixtureFile = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let name = file.name.unwrap_or_else(|| default_name.to_string());
    let schema = |e: Error| Error::Schema(e.to_string());
    let function = match file.kind.as_deref().unwrap_or("almost-periodic") {
        "almost-periodic" => {
            if file.a0.is_some() || !file.pairs.is_empty() {
                return Err(Error::Schema("a0/pairs belong to kind = \"periodic\"".into()));
            }
            let alpha = file.alpha.ok_or_else(|| Error::Schema("missing alpha".into()))?;
            let spectrum: Vec<(f64, Complex64)> =
                file.terms.iter().map(|&(l, re, im)| (l, Complex64::new(re, im))).collect();
            APFunction::from_signed(alpha, &spectrum, file.real_valued.unwrap_or(false)).map_err(schema)?
        }
        "periodic" => {
            if !file.terms.is_empty() || file.alpha.is_some() {
                return Err(Error::Schema("terms/alpha belong to almost periodic fixtures".into()));
            }
            PeriodicFunction::new(file.a0.unwrap_or(0.0), file.pairs).map_err(schema)?.to_ap()
        }
        other => return Err(Error::Schema(format!("unknown fixture kind {other:?}"))),
    };
    Ok(Fixture::new(name, function))
}

pub fn from_file(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArguments(format!("cannot read {}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture");
    from_toml_str(&text, stem)
}

/// A builtin name or, failing that, a path to a fixture document.
pub fn resolve(spec: &str) -> Result<Fixture> {
    let path = Path::new(spec);
    if path.extension().is_some_and(|e| e == "toml") || path.exists() {
        from_file(path)
    } else {
        builtin(spec)
    }
}

/// Inverse of [`PeriodicFunction::to_ap`] for real functions with integer
/// exponents.
pub fn to_periodic(f: &APFunction) -> Result<PeriodicFunction> {
    if !f.is_real_valued() {
        return Err(Error::InvalidFunction("periodic form needs a real-valued function".into()));
    }
    let degree = f.max_frequency().round() as usize;
    let mut pairs = vec![(0.0, 0.0); degree];
    for t in f.terms() {
        let nu = t.frequency.round();
        if (t.frequency - nu).abs() > INVARIANT_TOL * nu.max(1.0) {
            return Err(Error::InvalidFunction(format!("exponent {} is not an integer", t.frequency)));
        }
        pairs[nu as usize - 1] = (2.0 * t.pos.re, -2.0 * t.pos.im);
    }
    PeriodicFunction::new(f.constant_term().re, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builtins_evaluate() {
        let x: f64 = 0.7;
        let cases: [(&str, f64); 5] = [
            ("sine", x.sin()),
            ("sine-quarter-4", x.sin() + 0.25 * (4.0 * x).sin()),
            ("sine-half-3", x.sin() + 0.5 * (3.0 * x).sin()),
            ("lacunary-cosine", (1..=4).map(|j| 0.5f64.powi(j) * ((1 << j) as f64 * x).cos()).sum()),
            ("constant:2.5", 2.5),
        ];
        for (name, v) in cases {
            let f = builtin(name).unwrap();
            assert!((f.function.evaluate_real(x) - v).abs() < 1e-14, "{name}");
            assert!(f.function.verify_gap(1.0));
        }
        assert!(builtin("cosine").is_err());
        assert!(builtin("constant:abc").is_err());
    }

    #[test]
    fn periodic_round_trip() {
        for name in ["sine", "sine-quarter-4", "lacunary-cosine", "constant"] {
            let f = builtin(name).unwrap();
            let p = f.periodic().unwrap();
            for i in 0..100 {
                let x = -PI + 0.0628 * i as f64;
                assert!((p.evaluate(x) - f.function.evaluate_real(x)).abs() < 1e-13);
            }
            assert_eq!(p.to_ap(), f.function);
        }
        let irr = APFunction::real_trig(1.0, 0.0, &[(1.5, 1.0, 0.0)]).unwrap();
        assert!(to_periodic(&irr).is_err());
    }

    #[test]
    fn documents() {
        let f = from_toml_str(
            "name = \"s\"\nalpha = 1.0\nreal_valued = true\nterms = [[1.0, 0.0, -0.5], [-1.0, 0.0, 0.5]]\n",
            "x",
        )
        .unwrap();
        assert_eq!(f.function, builtin("sine").unwrap().function);
        assert_eq!(f.name, "s");
        let p = from_toml_str("kind = \"periodic\"\npairs = [[0.0, 1.0]]\n", "p").unwrap();
        assert_eq!(p.function, builtin("sine").unwrap().function);
        assert_eq!(p.name, "p");
        assert!(matches!(from_toml_str("terms = [[1.0, 0.0, 0.0]]", "m"), Err(Error::Schema(_))));
        assert!(matches!(
            from_toml_str("alpha = 1.0\nterms = [[1.0, 1.0, 0.0], [1.5, 1.0, 0.0]]", "g"),
            Err(Error::Schema(_))
        ));
        assert!(matches!(from_toml_str("alpha = 1.0\nbogus = 2", "b"), Err(Error::Schema(_))));
    }
}
