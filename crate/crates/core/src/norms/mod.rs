//! Norms, moduli of continuity and best-approximation functionals.
//!
//! Every sampled quantity here is a lower bound of the exact supremum that
//! converges as the grids refine; results carry the change observed on the
//! last refinement as their tolerance.

pub mod remez;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::apfun::{APFunction, PeriodicFunction};
use crate::error::{Error, Result};
use crate::extremum::{self, golden_max, sup_on_grid};
use crate::quadrature::{self, Tolerance};

pub use remez::{best_approx_periodic, remez_exchange, RemezResult};

/// Which norm a [`NormSpace`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// `sup |f|` over `[-π, π]`.
    UniformPeriodic,
    /// Stepanov norm with exponent `p` in `(1, ∞]`; `p = ∞` is the sup over the line.
    Stepanov { p: f64 },
}

/// Norm choice together with its sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpace {
    pub kind: NormKind,
    /// Initial number of window positions for the outer Stepanov supremum.
    pub window_count: usize,
    /// Sampling points per unit length for sampled suprema.
    pub grid_density: usize,
}

pub const DEFAULT_WINDOW_COUNT: usize = 64;
pub const DEFAULT_GRID_DENSITY: usize = 32;
/// Relative change below which window refinement stops.
pub const WINDOW_REFINE_TOL: f64 = 1e-6;
const MAX_WINDOW_LEVELS: u32 = 4;
const CELL_REL_TOL: f64 = 1e-10;
const REFINED_PEAKS: usize = 3;

impl NormSpace {
    pub fn uniform() -> Self {
        Self {
            kind: NormKind::UniformPeriodic,
            window_count: DEFAULT_WINDOW_COUNT,
            grid_density: DEFAULT_GRID_DENSITY,
        }
    }

    pub fn stepanov(p: f64) -> Result<Self> {
        if !(p > 1.0) || p.is_nan() {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self {
            kind: NormKind::Stepanov { p },
            window_count: DEFAULT_WINDOW_COUNT,
            grid_density: DEFAULT_GRID_DENSITY,
        })
    }

    /// The Stepanov exponent, or `∞` for the uniform norm.
    pub fn exponent(&self) -> f64 {
        match self.kind {
            NormKind::UniformPeriodic => f64::INFINITY,
            NormKind::Stepanov { p } => p,
        }
    }
}

/// A sampled value and the tolerance observed for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub tolerance: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Self { value, tolerance: 0.0 }
    }
}

/// Default range `[0, u_span]` for the outer Stepanov supremum: four periods
/// of the slowest exponent, at least `8π` and at most `64π`.
pub fn default_u_span(f: &APFunction) -> f64 {
    let span = f.min_positive_frequency().map_or(8.0 * PI, |l| 8.0 * PI / l);
    span.clamp(8.0 * PI, 64.0 * PI)
}

/// `sup |g|` over `[-π, π]`.
pub fn sup_abs_periodic<F: FnMut(f64) -> f64>(g: F, points: usize) -> Measured {
    let s = sup_on_grid(g, -PI, PI, points, 4);
    Measured {
        value: s.value.max(0.0),
        tolerance: s.refinement_gain.abs(),
    }
}

fn periodic_points(space: &NormSpace, degree: f64) -> usize {
    ((2.0 * PI * space.grid_density as f64).ceil() as usize)
        .max(64 * (degree.ceil() as usize + 1))
        .max(1024)
}

/// `‖f‖_{C_{2π}}` on a dense grid with one local refinement pass.
pub fn sup_norm_periodic(f: &PeriodicFunction) -> Measured {
    if f.degree() == 0 {
        return Measured::exact(f.a0().abs());
    }
    let points = periodic_points(&NormSpace::uniform(), f.degree() as f64);
    sup_abs_periodic(|x| f.evaluate(x).abs(), points)
}

/// Stepanov norm of a sampled nonnegative function `g = |h|`.
///
/// For finite `p` the windowed means `int_u^{u+π} g^p` are formed from
/// cumulative cell integrals on a grid of window positions in `[0, u_span]`;
/// the best windows are then refined by golden-section search and the grid is
/// doubled until the relative change drops below [`WINDOW_REFINE_TOL`].
pub fn stepanov_norm_sampled<F: Fn(f64) -> f64>(
    g: F,
    p: f64,
    u_span: f64,
    space: &NormSpace,
) -> Result<Measured> {
    if !(p > 1.0) || p.is_nan() {
        return Err(Error::InvalidExponent(p));
    }
    if !(u_span > 0.0) {
        return Err(Error::InvalidArguments(format!("u_span must be positive, got {u_span}")));
    }
    if p.is_infinite() {
        let length = u_span + PI;
        let points = ((length * space.grid_density as f64).ceil() as usize).max(256);
        let s = sup_on_grid(&g, 0.0, length, points, 4);
        return Ok(Measured {
            value: s.value.max(0.0),
            tolerance: s.refinement_gain.abs(),
        });
    }

    let gp = |t: f64| g(t).powf(p);
    let base_cells = ((space.window_count as f64 * PI / u_span).round() as usize).max(2);
    let mut previous: Option<f64> = None;
    let mut last = Measured::exact(0.0);
    for level in 0..=MAX_WINDOW_LEVELS {
        let per_pi = base_cells << level;
        let h = PI / per_pi as f64;
        let positions = (u_span / h).ceil() as usize;
        let nodes: Vec<f64> = (0..=positions + per_pi).map(|i| h * i as f64).collect();
        let (cells, _) = quadrature::integrate_cells(&gp, &nodes, CELL_REL_TOL, 30)?;
        let mut cumulative = Vec::with_capacity(cells.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for c in &cells {
            acc += c;
            cumulative.push(acc);
        }
        let windows: Vec<f64> = (0..=positions)
            .map(|i| cumulative[i + per_pi] - cumulative[i])
            .collect();
        let best = refine_windows(&gp, &windows, h, u_span)?;
        let value = (best.max(0.0) / PI).powf(1.0 / p);
        let change = previous.map_or(f64::INFINITY, |prev| (value - prev).abs());
        last = Measured { value, tolerance: change };
        if change <= WINDOW_REFINE_TOL * value || value == 0.0 {
            break;
        }
        previous = Some(value);
    }
    Ok(last)
}

fn refine_windows<F: Fn(f64) -> f64>(gp: &F, windows: &[f64], h: f64, u_span: f64) -> Result<f64> {
    let grid_best = windows.iter().copied().fold(0.0, f64::max);
    if grid_best == 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerance {
        abs: 1e-13 * grid_best,
        rel: 0.0,
        max_subdivisions: 200,
    };
    let mut failure = None;
    let mut window_at = |anchor: usize, u: f64| -> f64 {
        let u0 = h * anchor as f64;
        let gain = quadrature::integrate(gp, u0 + PI, u + PI, &tol);
        let loss = quadrature::integrate(gp, u0, u, &tol);
        match (gain, loss) {
            (Ok(g), Ok(l)) => windows[anchor] + g.value - l.value,
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(e);
                windows[anchor]
            }
        }
    };
    let last = windows.len() - 1;
    let mut maxima: Vec<usize> = (0..=last)
        .filter(|&i| {
            let l = if i == 0 { f64::NEG_INFINITY } else { windows[i - 1] };
            let r = if i == last { f64::NEG_INFINITY } else { windows[i + 1] };
            windows[i] >= l && windows[i] >= r
        })
        .collect();
    maxima.sort_by(|&i, &j| windows[j].total_cmp(&windows[i]).then(i.cmp(&j)));
    maxima.truncate(REFINED_PEAKS);
    let mut best = grid_best;
    for i in maxima {
        let lo = (h * i as f64 - h).max(0.0);
        let hi = (h * i as f64 + h).min(u_span);
        let (_, v) = golden_max(&mut |u| window_at(i, u), lo, hi, 1e-9 * h);
        best = best.max(v);
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Stepanov norm `sup_u {(1/π) int_u^{u+π} |f|^p}^{1/p}` (or `sup |f|` for
/// `p = ∞`) with the default window range of `f`.
pub fn stepanov_norm(f: &APFunction, p: f64, space: &NormSpace) -> Result<Measured> {
    stepanov_norm_with_span(f, p, default_u_span(f), space)
}

pub fn stepanov_norm_with_span(f: &APFunction, p: f64, u_span: f64, space: &NormSpace) -> Result<Measured> {
    if !(p > 1.0) || p.is_nan() {
        return Err(Error::InvalidExponent(p));
    }
    if f.is_constant() {
        return Ok(Measured::exact(f.constant_term().norm()));
    }
    stepanov_norm_sampled(|x| f.evaluate(x).norm(), p, u_span, space)
}

/// Norm of `f` in `space`; the window range is `u_span` for Stepanov norms.
pub fn norm_in(f: &APFunction, space: &NormSpace, u_span: f64) -> Result<Measured> {
    match space.kind {
        NormKind::UniformPeriodic => {
            if f.is_constant() {
                return Ok(Measured::exact(f.constant_term().norm()));
            }
            let points = periodic_points(space, f.max_frequency());
            Ok(sup_abs_periodic(|x| f.evaluate(x).norm(), points))
        }
        NormKind::Stepanov { p } => stepanov_norm_with_span(f, p, u_span, space),
    }
}

const MODULUS_STEPS: usize = 32;

/// Modulus of continuity `sup_{|t| <= delta} ‖f(·+t) - f(·)‖`.
///
/// Shifts are sampled on `[0, delta]` (the norm is even in `t`) and interior
/// maxima are refined by golden-section search.
pub fn modulus(f: &APFunction, delta: f64, space: &NormSpace) -> Result<Measured> {
    modulus_with_span(f, delta, space, default_u_span(f))
}

pub fn modulus_with_span(f: &APFunction, delta: f64, space: &NormSpace, u_span: f64) -> Result<Measured> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidArguments(format!("delta must be nonnegative, got {delta}")));
    }
    if delta == 0.0 || f.is_constant() {
        return Ok(Measured::exact(0.0));
    }
    let mut failure = None;
    let mut shift_norm = |t: f64| -> f64 {
        match norm_in(&f.shifted_difference(t), space, u_span) {
            Ok(m) => m.value,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let h = delta / MODULUS_STEPS as f64;
    let samples: Vec<f64> = (0..=MODULUS_STEPS).map(|i| shift_norm(h * i as f64)).collect();
    let last = MODULUS_STEPS;
    let (arg, grid_best) = samples
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut best = grid_best;
    if arg < last {
        let s = extremum::refine_samples(&mut shift_norm, 0.0, h, &samples, 2, 1e-9 * delta);
        best = best.max(s.value);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Measured {
        value: best,
        tolerance: best - grid_best,
    })
}

/// Upper bound `‖f - S_sigma f‖_{S^p}` for the best approximation by entire
/// functions of exponential type `sigma`: the truncated series is itself such
/// a function.
pub fn best_approx_stepanov_upper(f: &APFunction, sigma: f64, space: &NormSpace) -> Result<Measured> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArguments(format!("sigma must be nonnegative, got {sigma}")));
    }
    let tail = f.tail_above(sigma);
    if tail.is_constant() {
        return Ok(Measured::exact(0.0));
    }
    norm_in(&tail, space, default_u_span(f))
}

/// Jackson-type majorant `ω f(1/sigma)` in `space`.
pub fn jackson_rhs(f: &APFunction, sigma: f64, space: &NormSpace) -> Result<Measured> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArguments(format!("sigma must be positive, got {sigma}")));
    }
    modulus(f, 1.0 / sigma, space)
}
