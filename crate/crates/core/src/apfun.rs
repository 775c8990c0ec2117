//! Finite spectral models of almost periodic and periodic functions.
//!
//! An [`APFunction`] is a finite sum
//!
//! ```text
//! f(x) = A_0 + sum_nu ( A_nu e^{i lambda_nu x} + A_{-nu} e^{-i lambda_nu x} )
//! ```
//!
//! with `0 < lambda_1 < lambda_2 < ...` and consecutive gaps at least
//! `alpha` among the positive exponents. Instances are immutable; every
//! derived function (partial sums, tails, translates) is a new value.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance for invariant checks.
pub const INVARIANT_TOL: f64 = 1e-12;

/// `lambda <= gamma` with a relative slack of [`INVARIANT_TOL`], so that
/// cutoffs computed as `alpha * k / 2` include exponents sitting exactly on
/// the boundary.
pub fn within_cutoff(lambda: f64, gamma: f64) -> bool {
    lambda <= gamma + INVARIANT_TOL * gamma.abs().max(1.0)
}

/// One pair of conjugate exponents `±lambda` with their amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub frequency: f64,
    /// Amplitude `A_nu` of `e^{i lambda x}`.
    pub pos: Complex64,
    /// Amplitude `A_{-nu}` of `e^{-i lambda x}`.
    pub neg: Complex64,
}

impl Term {
    pub fn new(frequency: f64, pos: Complex64, neg: Complex64) -> Self {
        Self { frequency, pos, neg }
    }

    /// Real pair `a cos(lambda x) + b sin(lambda x)`.
    pub fn real(frequency: f64, cos_coeff: f64, sin_coeff: f64) -> Self {
        Self {
            frequency,
            pos: Complex64::new(0.5 * cos_coeff, -0.5 * sin_coeff),
            neg: Complex64::new(0.5 * cos_coeff, 0.5 * sin_coeff),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Complex64 {
        let (s, c) = (self.frequency * x).sin_cos();
        let e = Complex64::new(c, s);
        self.pos * e + self.neg * e.conj()
    }

    fn amplitude(&self) -> f64 {
        self.pos.norm() + self.neg.norm()
    }

    fn is_zero(&self) -> bool {
        self.pos == Complex64::new(0.0, 0.0) && self.neg == Complex64::new(0.0, 0.0)
    }
}

/// Finite almost periodic function with a declared exponent gap.
#[derive(Debug, Clone, PartialEq)]
pub struct APFunction {
    constant: Complex64,
    terms: Vec<Term>,
    alpha: f64,
    real_valued: bool,
}

impl APFunction {
    /// Validates and builds a function from its constant amplitude and the
    /// positive-frequency terms (in increasing order).
    pub fn new(constant: Complex64, terms: Vec<Term>, alpha: f64, real_valued: bool) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidFunction(format!("alpha must be positive, got {alpha}")));
        }
        if !constant.re.is_finite() || !constant.im.is_finite() {
            return Err(Error::InvalidFunction("non-finite constant amplitude".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if !(t.frequency > 0.0) || !t.frequency.is_finite() {
                return Err(Error::InvalidFunction(format!(
                    "exponent {} must be positive and finite, got {}",
                    i + 1,
                    t.frequency
                )));
            }
            if !(t.amplitude() > 0.0) || !t.amplitude().is_finite() {
                return Err(Error::InvalidFunction(format!(
                    "exponent {} has zero or non-finite amplitudes",
                    t.frequency
                )));
            }
            if real_valued {
                let diff = (t.neg - t.pos.conj()).norm();
                if diff > INVARIANT_TOL * t.pos.norm().max(t.neg.norm()) {
                    return Err(Error::InvalidFunction(format!(
                        "real-valued function needs conjugate amplitudes at exponent {}",
                        t.frequency
                    )));
                }
            }
        }
        for w in terms.windows(2) {
            if !(w[1].frequency > w[0].frequency) {
                return Err(Error::InvalidFunction(format!(
                    "exponents must increase strictly ({} then {})",
                    w[0].frequency, w[1].frequency
                )));
            }
        }
        if real_valued && constant.im.abs() > INVARIANT_TOL * constant.re.abs().max(1.0) {
            return Err(Error::InvalidFunction("real-valued function needs a real constant".into()));
        }
        let f = Self {
            constant: if real_valued { Complex64::new(constant.re, 0.0) } else { constant },
            terms,
            alpha,
            real_valued,
        };
        if !f.verify_gap(alpha) {
            return Err(Error::GapViolation(format!(
                "consecutive exponents closer than alpha = {alpha}"
            )));
        }
        Ok(f)
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self {
            constant: Complex64::new(c, 0.0),
            terms: Vec::new(),
            alpha: 1.0,
            real_valued: true,
        }
    }

    /// Real trigonometric sum `c + sum (a_j cos(l_j x) + b_j sin(l_j x))`;
    /// pairs with both coefficients zero are dropped.
    pub fn real_trig(alpha: f64, constant: f64, pairs: &[(f64, f64, f64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .filter(|(_, a, b)| *a != 0.0 || *b != 0.0)
            .map(|&(l, a, b)| Term::real(l, a, b))
            .collect();
        Self::new(Complex64::new(constant, 0.0), terms, alpha, true)
    }

    /// Builds a function from `(signed frequency, amplitude)` pairs; a
    /// negative frequency sets `A_{-nu}`.
    pub fn from_signed(alpha: f64, spectrum: &[(f64, Complex64)], real_valued: bool) -> Result<Self> {
        let mut constant = Complex64::new(0.0, 0.0);
        let mut terms: Vec<Term> = Vec::new();
        let mut sorted: Vec<_> = spectrum.to_vec();
        sorted.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(b.0.total_cmp(&a.0)));
        for (freq, amp) in sorted {
            if !freq.is_finite() {
                return Err(Error::InvalidFunction("non-finite frequency".into()));
            }
            if freq == 0.0 {
                constant += amp;
                continue;
            }
            let l = freq.abs();
            let slot = match terms.last_mut() {
                Some(t) if t.frequency == l => t,
                _ => {
                    terms.push(Term::new(l, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
                    terms.last_mut().expect("just pushed")
                }
            };
            if freq > 0.0 {
                slot.pos += amp;
            } else {
                slot.neg += amp;
            }
        }
        terms.retain(|t| !t.is_zero());
        Self::new(constant, terms, alpha, real_valued)
    }

    /// Derived function sharing the spectrum structure of `self`; terms with
    /// vanishing amplitudes are dropped, so no invariant can break.
    fn derived(&self, constant: Complex64, terms: Vec<Term>) -> Self {
        Self {
            constant,
            terms: terms.into_iter().filter(|t| !t.is_zero()).collect(),
            alpha: self.alpha,
            real_valued: self.real_valued,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// Amplitude of the zero exponent.
    pub fn constant_term(&self) -> Complex64 {
        self.constant
    }

    /// Positive-frequency terms in increasing order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.frequency)
    }

    pub fn min_positive_frequency(&self) -> Option<f64> {
        self.terms.first().map(|t| t.frequency)
    }

    /// `|A_0| + sum (|A_nu| + |A_{-nu}|)`, an upper bound for `sup |f|`.
    pub fn amplitude_bound(&self) -> f64 {
        self.constant.norm() + self.terms.iter().map(Term::amplitude).sum::<f64>()
    }

    /// Exact Fourier coefficient at `lambda` (signed); zero off the spectrum.
    pub fn coefficient(&self, lambda: f64) -> Complex64 {
        if lambda == 0.0 {
            return self.constant;
        }
        self.terms
            .iter()
            .find(|t| t.frequency == lambda.abs())
            .map_or(Complex64::new(0.0, 0.0), |t| if lambda > 0.0 { t.pos } else { t.neg })
    }

    /// All nonzero coefficients `(signed frequency, amplitude)`.
    pub fn spectrum(&self) -> Vec<(f64, Complex64)> {
        let mut out = Vec::with_capacity(2 * self.terms.len() + 1);
        if self.constant.norm() > 0.0 {
            out.push((0.0, self.constant));
        }
        for t in &self.terms {
            if t.neg.norm() > 0.0 {
                out.push((-t.frequency, t.neg));
            }
            if t.pos.norm() > 0.0 {
                out.push((t.frequency, t.pos));
            }
        }
        out
    }

    /// `sum A_nu e^{i lambda_nu x}` over the finite spectrum.
    #[inline]
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.terms.iter().fold(self.constant, |acc, t| acc + t.eval(x))
    }

    /// Real part of [`evaluate`](Self::evaluate); exact for real-valued functions.
    pub fn evaluate_real(&self, x: f64) -> f64 {
        self.evaluate(x).re
    }

    /// `f(x+t) + f(x-t) - 2f(x)`.
    pub fn phi(&self, x: f64, t: f64) -> Complex64 {
        self.evaluate(x + t) + self.evaluate(x - t) - self.evaluate(x) * 2.0
    }

    /// True iff every consecutive gap among the positive exponents is at
    /// least `alpha` (up to [`INVARIANT_TOL`] relative slack).
    pub fn verify_gap(&self, alpha: f64) -> bool {
        self.terms
            .windows(2)
            .all(|w| w[1].frequency - w[0].frequency >= alpha * (1.0 - INVARIANT_TOL))
    }

    /// Terms with `lambda_nu <= gamma` (inclusive); the constant always stays.
    pub fn partial_sum(&self, gamma: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .copied()
            .filter(|t| within_cutoff(t.frequency, gamma))
            .collect();
        self.derived(self.constant, terms)
    }

    /// `f - partial_sum(f, gamma)`: the terms strictly above the cutoff.
    pub fn tail_above(&self, gamma: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .copied()
            .filter(|t| !within_cutoff(t.frequency, gamma))
            .collect();
        self.derived(Complex64::new(0.0, 0.0), terms)
    }

    /// Number of positive exponents with `lambda_nu <= gamma`.
    pub fn count_within(&self, gamma: f64) -> usize {
        self.terms.iter().take_while(|t| within_cutoff(t.frequency, gamma)).count()
    }

    /// The translate `x -> f(x + h)`.
    pub fn translate(&self, h: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let e = Complex64::from_polar(1.0, t.frequency * h);
                Term::new(t.frequency, t.pos * e, t.neg * e.conj())
            })
            .collect();
        self.derived(self.constant, terms)
    }

    /// `x -> f(x + t) - f(x)`.
    pub fn shifted_difference(&self, t: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let e = Complex64::from_polar(1.0, term.frequency * t);
                Term::new(term.frequency, term.pos * (e - one), term.neg * (e.conj() - one))
            })
            .collect();
        self.derived(Complex64::new(0.0, 0.0), terms)
    }

    /// `c * f` for real `c`.
    pub fn scale(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.frequency, t.pos * c, t.neg * c))
            .collect();
        self.derived(self.constant * c, terms)
    }

    /// Term-wise sum of two spectra; checked against the smaller gap.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut spectrum = self.spectrum();
        spectrum.extend(other.spectrum());
        Self::from_signed(
            self.alpha.min(other.alpha),
            &spectrum,
            self.real_valued && other.real_valued,
        )
    }

    /// `(1/L) int_0^L f(t) e^{-i lambda t} dt` by adaptive quadrature.
    ///
    /// Converges to the Fourier coefficient at `lambda` as `L` grows.
    pub fn mean_coefficient(&self, lambda: f64, length: f64) -> Result<Complex64> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArguments(format!("length must be positive, got {length}")));
        }
        let omega = self.max_frequency() + lambda.abs();
        let width = if omega > 0.0 { PI / omega } else { length };
        let tol = 1e-11 * length * self.amplitude_bound().max(f64::MIN_POSITIVE);
        let r = quadrature::integrate_uniform(
            |t: f64| self.evaluate(t) * Complex64::from_polar(1.0, -lambda * t),
            0.0,
            length,
            width,
            tol,
            30,
            1_000_000,
        )?;
        Ok(r.value / length)
    }
}

/// Real `2π`-periodic trigonometric polynomial
/// `a0 + sum_{nu=1}^{N} (a_nu cos(nu x) + b_nu sin(nu x))`.
///
/// `a0` is the constant term itself (the `a_0/2` of the classical form).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction {
    a0: f64,
    pairs: Vec<(f64, f64)>,
}

impl PeriodicFunction {
    pub fn new(a0: f64, pairs: Vec<(f64, f64)>) -> Result<Self> {
        if !a0.is_finite() || pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidFunction("non-finite coefficient".into()));
        }
        Ok(Self { a0, pairs })
    }

    pub fn constant(c: f64) -> Self {
        Self { a0: c, pairs: Vec::new() }
    }

    /// Single harmonic `a cos(nu x) + b sin(nu x)`.
    pub fn harmonic(nu: usize, a: f64, b: f64) -> Self {
        let mut pairs = vec![(0.0, 0.0); nu];
        if nu > 0 {
            pairs[nu - 1] = (a, b);
            Self { a0: 0.0, pairs }
        } else {
            Self { a0: a, pairs }
        }
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `(a_nu, b_nu)` for `nu = 1..=N`.
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Highest `nu` with a nonzero pair (0 for constants).
    pub fn degree(&self) -> usize {
        self.pairs
            .iter()
            .rposition(|&(a, b)| a != 0.0 || b != 0.0)
            .map_or(0, |i| i + 1)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.pairs.iter().enumerate().fold(self.a0, |acc, (i, &(a, b))| {
            if a == 0.0 && b == 0.0 {
                return acc;
            }
            let (s, c) = ((i + 1) as f64 * x).sin_cos();
            acc + a * c + b * s
        })
    }

    /// Degree-`k` Fourier partial sum.
    pub fn partial_sum(&self, k: usize) -> Self {
        Self {
            a0: self.a0,
            pairs: self.pairs.iter().take(k).copied().collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            a0: self.a0 * c,
            pairs: self.pairs.iter().map(|&(a, b)| (a * c, b * c)).collect(),
        }
    }

    /// Lossless conversion to integer exponents with `alpha = 1`.
    pub fn to_ap(&self) -> APFunction {
        let pairs: Vec<(f64, f64, f64)> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| ((i + 1) as f64, a, b))
            .collect();
        APFunction::real_trig(1.0, self.a0, &pairs).expect("integer exponents have unit gaps")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sine() -> APFunction {
        APFunction::real_trig(1.0, 0.0, &[(1.0, 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn evaluates_constant_and_sine() {
        assert!((APFunction::constant(1.0).evaluate(3.7) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = sine().evaluate(PI / 2.0);
        assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn incommensurable_sum_matches_direct_summation() {
        let s2 = 2f64.sqrt();
        let f = APFunction::real_trig(0.4, 0.0, &[(1.0, 0.0, 1.0), (s2, 0.0, 1.0)]).unwrap();
        // e^{ix}/(2i) - e^{-ix}/(2i) summed by hand for both exponents
        let direct: Complex64 = [1.0, s2]
            .iter()
            .map(|&l| {
                let i = Complex64::new(0.0, 1.0);
                ((i * l).exp() - (-i * l).exp()) / (2.0 * i)
            })
            .sum();
        assert!((f.evaluate(1.0) - direct).norm() < 1e-14);
        assert!((direct.re - (1f64.sin() + s2.sin())).abs() < 1e-14);
    }

    #[test]
    fn phi_examples() {
        let c = APFunction::constant(4.2);
        assert!(c.phi(1.3, 0.7).norm() < 1e-14);
        let cos = APFunction::real_trig(1.0, 0.0, &[(1.0, 1.0, 0.0)]).unwrap();
        for &t in &[0.1, 0.9, 2.5] {
            let expected = 2.0 * f64::cos(t) - 2.0;
            assert!((cos.phi(0.0, t).re - expected).abs() < 1e-14);
        }
        assert!(sine().phi(0.3, 0.0).norm() < 1e-15);
    }

    #[test]
    fn gap_examples() {
        let f = |ls: &[f64]| {
            APFunction {
                constant: Complex64::new(1.0, 0.0),
                terms: ls.iter().map(|&l| Term::real(l, 1.0, 0.0)).collect(),
                alpha: 0.1,
                real_valued: true,
            }
        };
        assert!(f(&[1.0, 3.0]).verify_gap(2.0));
        assert!(!f(&[1.0, 1.5]).verify_gap(1.0));
        assert!(f(&[2.0]).verify_gap(2.0));
    }

    #[test]
    fn construction_rejects_invalid_spectra() {
        assert!(matches!(
            APFunction::real_trig(1.0, 0.0, &[(1.0, 1.0, 0.0), (1.5, 1.0, 0.0)]),
            Err(Error::GapViolation(_))
        ));
        assert!(APFunction::real_trig(1.0, 0.0, &[(2.0, 1.0, 0.0), (1.0, 1.0, 0.0)]).is_err());
        let bad = Term::new(1.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        assert!(APFunction::new(Complex64::new(0.0, 0.0), vec![bad], 1.0, true).is_err());
        assert!(APFunction::new(Complex64::new(0.0, 0.0), vec![bad], 1.0, false).is_ok());
        let zero = Term::new(1.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(APFunction::new(Complex64::new(0.0, 0.0), vec![zero], 1.0, false).is_err());
        assert!(APFunction::new(Complex64::new(0.0, 1.0), vec![], 1.0, true).is_err());
    }

    #[test]
    fn mean_coefficient_constant_and_exponentials() {
        let one = APFunction::constant(1.0);
        assert!((one.mean_coefficient(0.0, 17.0).unwrap() - 1.0).norm() < 1e-12);

        let e2 = APFunction::from_signed(1.0, &[(2.0, Complex64::new(1.0, 0.0))], false).unwrap();
        // closed forms: resonant mean is exactly 1; off-resonance it is
        // (e^{-iL} - 1) / (-iL)
        let l = 1000.0;
        let on = e2.mean_coefficient(2.0, l).unwrap();
        assert!((on - 1.0).norm() < 1e-9);
        let off = e2.mean_coefficient(3.0, l).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let exact = ((-i * l).exp() - 1.0) / (-i * l);
        assert!((off - exact).norm() < 1e-10);
        assert!(off.norm() <= 2.0 / l + 1e-10);
    }

    #[test]
    fn mean_coefficient_error_halves_when_length_doubles() {
        let f = APFunction::from_signed(
            1.0,
            &[(2.0, Complex64::new(1.0, 0.0)), (3.0, Complex64::new(0.5, 0.0))],
            false,
        )
        .unwrap();
        // L = (2π/3)(3m+1) puts e^{iL} and e^{2iL} at the same distance from 1
        let l = 2.0 * PI / 3.0 * (3.0 * 40.0 + 1.0);
        let e1 = (f.mean_coefficient(2.0, l).unwrap() - 1.0).norm();
        let e2 = (f.mean_coefficient(2.0, 2.0 * l).unwrap() - 1.0).norm();
        assert!(e1 > 0.0);
        assert!((e1 / e2 - 2.0).abs() < 1e-6, "ratio {}", e1 / e2);
    }

    #[test]
    fn periodic_conversion_matches_trig_evaluation() {
        let p = PeriodicFunction::new(0.3, vec![(1.0, -0.5), (0.0, 0.0), (0.25, 2.0)]).unwrap();
        assert_eq!(p.degree(), 3);
        let f = p.to_ap();
        assert_eq!(f.terms().len(), 2);
        for i in 0..1000 {
            let x = -PI + 2.0 * PI * i as f64 / 1000.0;
            let direct = 0.3 + x.cos() - 0.5 * x.sin() + 0.25 * (3.0 * x).cos() + 2.0 * (3.0 * x).sin();
            assert!((f.evaluate(x).re - direct).abs() < 1e-12);
            assert!((p.evaluate(x) - direct).abs() < 1e-12);
            assert!(f.evaluate(x).im.abs() < 1e-12);
        }
    }

    fn arb_function() -> impl Strategy<Value = APFunction> {
        (
            -2.0..2.0f64,
            prop::collection::vec((0.5..2.0f64, -1.0..1.0f64, -1.0..1.0f64), 0..5),
        )
            .prop_map(|(c, raw)| {
                let mut lambda = 0.0;
                let pairs: Vec<_> = raw
                    .into_iter()
                    .map(|(gap, a, b)| {
                        lambda += gap;
                        (lambda, a, b)
                    })
                    .collect();
                APFunction::real_trig(0.5, c, &pairs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn evaluation_is_linear(f in arb_function(), g in arb_function(), x in -20.0..20.0f64) {
            if let Ok(sum) = f.add(&g) {
                let lhs = sum.evaluate(x);
                let rhs = f.evaluate(x) + g.evaluate(x);
                prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn phi_is_even_in_t(f in arb_function(), x in -10.0..10.0f64, t in -10.0..10.0f64) {
            prop_assert!((f.phi(x, t) - f.phi(x, -t)).norm() <= 1e-12 * (1.0 + f.amplitude_bound()));
        }

        #[test]
        fn translate_matches_shifted_evaluation(f in arb_function(), x in -10.0..10.0f64, h in -5.0..5.0f64) {
            let lhs = f.translate(h).evaluate(x);
            let rhs = f.evaluate(x + h);
            prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + f.amplitude_bound()));
        }
    }
}
