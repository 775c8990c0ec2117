//! Partial sums, the kernel `Ψ_{λ,η}`, the integral representation of
//! partial sums, matrix transforms and strong means.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apfun::{within_cutoff, APFunction, PeriodicFunction, INVARIANT_TOL};
use crate::error::{Error, Result};
use crate::norms::{self, Measured, NormKind, NormSpace};
use crate::quadrature::{self, Integral};
use crate::seqclass::{check_t1, MatrixRow};

/// Cutoffs `γ_k` for the partial sums of a matrix transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaSequence {
    /// `γ_k = slope * k`.
    Linear { slope: f64 },
    /// Listed values, extended by the last one.
    Explicit(Vec<f64>),
}

impl GammaSequence {
    pub fn linear(slope: f64) -> Result<Self> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::InvalidArguments(format!("gamma slope must be nonnegative, got {slope}")));
        }
        Ok(Self::Linear { slope })
    }

    /// The default `γ_k = αk/2`.
    pub fn half_alpha(alpha: f64) -> Result<Self> {
        Self::linear(alpha / 2.0)
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArguments("empty gamma sequence".into()));
        }
        if !(values[0] >= 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArguments("gamma values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArguments("gamma sequence must be nondecreasing".into()));
        }
        Ok(Self::Explicit(values))
    }

    pub fn at(&self, k: usize) -> f64 {
        match self {
            Self::Linear { slope } => slope * k as f64,
            Self::Explicit(v) => v[k.min(v.len() - 1)],
        }
    }
}

/// `S_gamma f`: the terms with `lambda_nu <= gamma`, boundary included.
pub fn partial_sum(f: &APFunction, gamma: f64) -> APFunction {
    f.partial_sum(gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarPartialSum {
    /// `S_{αk/2} f`.
    pub sum: APFunction,
    /// Position in `f.terms()` of the exponent inside `(αk/2, α(k+1)/2)`.
    pub occupied: Option<usize>,
}

/// `S_{αk/2} f` and the exponent, if any, lying in the open interval
/// `(αk/2, α(k+1)/2)`; then `S*_{k+1} = S_{α(k+1)/2}` differs from it by
/// exactly that pair of terms.
pub fn star_partial_sum(f: &APFunction, alpha: f64, k: usize) -> Result<StarPartialSum> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArguments(format!("alpha must be positive, got {alpha}")));
    }
    let lo = alpha * k as f64 / 2.0;
    let hi = alpha * (k + 1) as f64 / 2.0;
    let inside: Vec<usize> = f
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, t)| strictly_inside(t.frequency, lo, hi))
        .map(|(i, _)| i)
        .collect();
    if inside.len() > 1 {
        return Err(Error::GapViolation(format!(
            "{} exponents in ({lo}, {hi})",
            inside.len()
        )));
    }
    Ok(StarPartialSum {
        sum: f.partial_sum(lo),
        occupied: inside.first().copied(),
    })
}

fn strictly_inside(lambda: f64, lo: f64, hi: f64) -> bool {
    !within_cutoff(lambda, lo) && lambda < hi - INVARIANT_TOL * hi.max(1.0)
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[inline]
fn psi_unchecked(lambda: f64, eta: f64, t: f64) -> f64 {
    let a = 0.5 * (eta - lambda);
    let b = 0.5 * (eta + lambda);
    (b / PI) * sinc(a * t) * sinc(b * t)
}

/// `Ψ_{λ,η}(t) = 2 sin((η-λ)t/2) sin((η+λ)t/2) / (π(η-λ)t²)`, with the limit
/// `(η+λ)/(2π)` at `t = 0`.
pub fn kernel_psi(lambda: f64, eta: f64, t: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !(eta > lambda) || !eta.is_finite() {
        return Err(Error::InvalidArguments(format!(
            "kernel needs eta > lambda >= 0, got lambda = {lambda}, eta = {eta}"
        )));
    }
    Ok(psi_unchecked(lambda, eta, t))
}

/// Truncation and accuracy of the improper kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Upper limit `T` replacing infinity.
    pub truncation: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

pub const DEFAULT_REL_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 1_000_000;

impl QuadratureSpec {
    pub fn new(truncation: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(truncation > 0.0) || !truncation.is_finite() {
            return Err(Error::InvalidArguments(format!("truncation must be positive, got {truncation}")));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidArguments(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidArguments("max_subdivisions must be positive".into()));
        }
        Ok(Self {
            truncation,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Smallest `T` whose tail bound `4‖f‖/(π width T)` is `rel_tol ‖f‖`.
    pub fn from_tail_bound(width: f64, rel_tol: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArguments(format!("kernel width must be positive, got {width}")));
        }
        Self::new(4.0 / (PI * width * rel_tol), rel_tol, DEFAULT_MAX_SUBDIVISIONS)
    }
}

/// `4 bound / (π (η - λ) T)`, from `|Ψ(t)| <= 2/(π(η-λ)t²)`.
pub fn tail_bound(bound: f64, lambda: f64, eta: f64, truncation: f64) -> f64 {
    4.0 * bound / (PI * (eta - lambda) * truncation)
}

/// `2 ∫_0^T cos(ωt) Ψ_{λ,η}(t) dt`. As `T → ∞` this tends to 1 for
/// `ω <= λ`, to 0 for `ω >= η`, and is linear in between.
pub fn kernel_moment(omega: f64, lambda: f64, eta: f64, quad: &QuadratureSpec) -> Result<Integral<f64>> {
    kernel_psi(lambda, eta, 0.0)?;
    let b = 0.5 * (eta + lambda);
    // panels subdivide the zero spacing of sin(bt) down to a half period
    // of the fastest product frequency ω + η
    let zero_spacing = PI / b;
    let split = ((omega.abs() + eta) / b).ceil().max(1.0);
    let width = zero_spacing / split;
    quadrature::integrate_uniform(
        |t: f64| 2.0 * (omega * t).cos() * psi_unchecked(lambda, eta, t),
        0.0,
        quad.truncation,
        width,
        0.1 * quad.rel_tol,
        40,
        quad.max_subdivisions,
    )
}

/// A value from the truncated integral representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Representation {
    pub value: Complex64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
}

impl Representation {
    pub fn tolerance(&self) -> f64 {
        self.quadrature_error + self.tail_bound
    }
}

/// Kernel moments for every exponent of `f`, constant first.
struct Moments {
    constant: f64,
    terms: Vec<f64>,
    error: f64,
    tail: f64,
}

impl Moments {
    fn new(f: &APFunction, lambda: f64, eta: f64, quad: &QuadratureSpec) -> Result<Self> {
        let mut error = 0.0;
        let c = kernel_moment(0.0, lambda, eta, quad)?;
        error += f.constant_term().norm() * c.error;
        let mut terms = Vec::with_capacity(f.terms().len());
        for t in f.terms() {
            let m = kernel_moment(t.frequency, lambda, eta, quad)?;
            error += (t.pos.norm() + t.neg.norm()) * m.error;
            terms.push(m.value);
        }
        Ok(Self {
            constant: c.value,
            terms,
            error,
            tail: tail_bound(f.amplitude_bound(), lambda, eta, quad.truncation),
        })
    }

    /// `∫_0^T {f(x+t) + f(x-t)} Ψ(t) dt` through the even-part identity
    /// `f(x+t) + f(x-t) = 2A_0 + sum 2cos(λt)(A e^{iλx} + A_- e^{-iλx})`.
    fn apply(&self, f: &APFunction, x: f64) -> Complex64 {
        let mut v = f.constant_term() * self.constant;
        for (t, m) in f.terms().iter().zip(&self.terms) {
            v += t.eval(x) * *m;
        }
        v
    }
}

fn check_representation(f: &APFunction, lambda_k: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !(lambda_k >= 0.0) {
        return Err(Error::InvalidArguments(format!(
            "need lambda_k >= 0 and alpha > 0, got {lambda_k} and {alpha}"
        )));
    }
    if !f.verify_gap(alpha) {
        return Err(Error::PreconditionViolation(format!("exponent gaps are below {alpha}")));
    }
    let eta = lambda_k + alpha;
    if let Some(t) = f.terms().iter().find(|t| strictly_inside(t.frequency, lambda_k, eta)) {
        return Err(Error::PreconditionViolation(format!(
            "exponent {} lies in ({lambda_k}, {eta})",
            t.frequency
        )));
    }
    Ok(())
}

/// `S_{λ_k} f(x) ≈ ∫_0^T {f(x+t) + f(x-t)} Ψ_{λ_k, λ_k+α}(t) dt`.
pub fn integral_partial_sum(
    f: &APFunction,
    x: f64,
    lambda_k: f64,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<Representation> {
    Ok(integral_partial_sums(f, &[x], lambda_k, alpha, quad)?.remove(0))
}

/// [`integral_partial_sum`] at several points; the kernel moments are
/// computed once.
pub fn integral_partial_sums(
    f: &APFunction,
    xs: &[f64],
    lambda_k: f64,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<Representation>> {
    check_representation(f, lambda_k, alpha)?;
    let m = Moments::new(f, lambda_k, lambda_k + alpha, quad)?;
    Ok(xs
        .iter()
        .map(|&x| Representation {
            value: m.apply(f, x),
            quadrature_error: m.error,
            tail_bound: m.tail,
        })
        .collect())
}

/// `∫_0^T φ_x(t) Ψ_k(t) dt` with `Ψ_k = Ψ_{αk/2, α(k+1)/2}`, which
/// represents `S*_k f(x) - f(x)` when `(αk/2, α(k+1)/2)` holds no exponent.
pub fn star_deviation_integral(
    f: &APFunction,
    x: f64,
    alpha: f64,
    k: usize,
    quad: &QuadratureSpec,
) -> Result<Representation> {
    let lambda = alpha * k as f64 / 2.0;
    let eta = alpha * (k + 1) as f64 / 2.0;
    let star = star_partial_sum(f, alpha, k)?;
    if let Some(i) = star.occupied {
        return Err(Error::PreconditionViolation(format!(
            "exponent {} lies in ({lambda}, {eta})",
            f.terms()[i].frequency
        )));
    }
    let m = Moments::new(f, lambda, eta, quad)?;
    // φ_x = f(x+t) + f(x-t) - 2f(x); the last part integrates to f(x) m(0)
    let value = m.apply(f, x) - f.evaluate(x) * m.constant;
    Ok(Representation {
        value,
        quadrature_error: m.error + f.evaluate(x).norm() * m.error,
        tail_bound: 2.0 * m.tail,
    })
}

/// `Ψ_k(t) = 4 sin(αt/4) sin(α(2k+1)t/4) / (παt²)`.
pub fn kernel_psi_k(alpha: f64, k: usize, t: f64) -> Result<f64> {
    kernel_psi(alpha * k as f64 / 2.0, alpha * (k + 1) as f64 / 2.0, t)
}

fn require_t1(row: &MatrixRow) -> Result<()> {
    if !check_t1(row) {
        return Err(Error::RowSumViolation {
            n: row.n(),
            sum: row.sum(),
        });
    }
    Ok(())
}

/// `T_{n,A,γ} f(x) = sum_k a_{n,k} S_{γ_k} f(x)`.
pub fn matrix_transform(f: &APFunction, row: &MatrixRow, gammas: &GammaSequence, x: f64) -> Result<Complex64> {
    require_t1(row)?;
    let values: Vec<Complex64> = f.terms().iter().map(|t| t.eval(x)).collect();
    let mut prefix = Vec::with_capacity(values.len() + 1);
    let mut acc = f.constant_term();
    prefix.push(acc);
    for v in &values {
        acc += v;
        prefix.push(acc);
    }
    Ok(row
        .entries()
        .map(|(k, a)| prefix[f.count_within(gammas.at(k))] * a)
        .sum())
}

/// Row weights of a strong mean grouped by how many exponents the partial
/// sum keeps, so that `|S_{γ_k} f - f|` is the modulus of one fixed tail.
#[derive(Debug, Clone)]
pub struct DeviationProfile<'a> {
    f: &'a APFunction,
    /// `(kept, summed weight)` with `kept < #terms`.
    groups: Vec<(usize, f64)>,
    q: f64,
}

impl<'a> DeviationProfile<'a> {
    pub fn new(f: &'a APFunction, row: &MatrixRow, gammas: &GammaSequence, q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidExponent(q));
        }
        require_t1(row)?;
        let m = f.terms().len();
        let mut weights = vec![0.0; m];
        for (k, a) in row.entries() {
            let kept = f.count_within(gammas.at(k));
            if kept < m {
                weights[kept] += a;
            }
        }
        let groups = weights.into_iter().enumerate().filter(|g| g.1 > 0.0).collect();
        Ok(Self { f, groups, q })
    }

    /// All deviations vanish identically.
    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// `T^q(x) = {sum_k a_{n,k} |S_{γ_k} f(x) - f(x)|^q}^{1/q}`.
    pub fn value(&self, x: f64) -> f64 {
        if self.groups.is_empty() {
            return 0.0;
        }
        let terms = self.f.terms();
        let lowest = self.groups[0].0;
        let mut suffix = vec![Complex64::new(0.0, 0.0); terms.len() + 1 - lowest];
        for j in (lowest..terms.len()).rev() {
            suffix[j - lowest] = suffix[j + 1 - lowest] + terms[j].eval(x);
        }
        let s: f64 = self
            .groups
            .iter()
            .map(|&(kept, w)| w * suffix[kept - lowest].norm().powf(self.q))
            .sum();
        s.powf(1.0 / self.q)
    }
}

/// The strong mean `T^q_{n,A,γ} f(x)`.
pub fn strong_mean(f: &APFunction, row: &MatrixRow, gammas: &GammaSequence, q: f64, x: f64) -> Result<f64> {
    Ok(DeviationProfile::new(f, row, gammas, q)?.value(x))
}

/// `‖T^q_{n,A,γ} f‖` in `space`; Stepanov windows range over the default
/// span of `f`.
pub fn strong_mean_norm(
    f: &APFunction,
    row: &MatrixRow,
    gammas: &GammaSequence,
    q: f64,
    space: &NormSpace,
) -> Result<Measured> {
    let profile = DeviationProfile::new(f, row, gammas, q)?;
    profile_norm(&profile, space)
}

/// Norm of a strong-mean profile in `space`.
pub fn profile_norm(profile: &DeviationProfile<'_>, space: &NormSpace) -> Result<Measured> {
    if profile.is_zero() {
        return Ok(Measured::exact(0.0));
    }
    match space.kind {
        NormKind::UniformPeriodic => {
            let points = ((2.0 * PI * space.grid_density as f64).ceil() as usize)
                .max(64 * (profile.f.max_frequency().ceil() as usize + 1))
                .max(1024);
            Ok(norms::sup_abs_periodic(|x| profile.value(x), points))
        }
        NormKind::Stepanov { p } => {
            norms::stepanov_norm_sampled(|x| profile.value(x), p, norms::default_u_span(profile.f), space)
        }
    }
}

/// Periodic strong mean `‖{sum a_{n,k} |S_k f - f|^q}^{1/q}‖_{C_{2π}}`.
pub fn strong_mean_periodic(f: &PeriodicFunction, row: &MatrixRow, q: f64) -> Result<Measured> {
    strong_mean_norm(&f.to_ap(), row, &GammaSequence::linear(1.0)?, q, &NormSpace::uniform())
}
