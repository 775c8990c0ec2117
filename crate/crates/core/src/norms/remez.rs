//! Best uniform approximation by trigonometric polynomials.
//!
//! Trigonometric polynomials of degree `k` form a Haar space of dimension
//! `2k + 1` on the circle, so the best approximant is characterised by an
//! error that equioscillates on `2k + 2` points of `[-π, π)`. The exchange
//! iteration below seeds its reference from a discrete grid of at least
//! `16 (N + k + 1)` points, polishes each extremum by golden-section search
//! on the continuous error, and stops once the levelled error and the
//! observed maximum agree to [`EQUIOSCILLATION_TOL`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::Measured;
use crate::apfun::PeriodicFunction;
use crate::error::{Error, Result};
use crate::extremum::golden_max;

pub const EQUIOSCILLATION_TOL: f64 = 1e-8;
pub const MAX_EXCHANGE_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RemezResult {
    /// Maximum of `|f - t_k|` for the final approximant.
    pub deviation: f64,
    /// Levelled error `|h|`: a lower bound for `E_k(f)`.
    pub levelled: f64,
    /// Coefficients `c_0, a_1, b_1, ..., a_k, b_k` of the approximant.
    pub coefficients: Vec<f64>,
    pub reference: Vec<f64>,
    pub iterations: usize,
}

fn basis(k: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    for j in 1..=k {
        let (s, c) = (j as f64 * x).sin_cos();
        out[2 * j - 1] = c;
        out[2 * j] = s;
    }
}

fn approximant(coeffs: &[f64], k: usize, x: f64) -> f64 {
    let mut v = coeffs[0];
    for j in 1..=k {
        let (s, c) = (j as f64 * x).sin_cos();
        v += coeffs[2 * j - 1] * c + coeffs[2 * j] * s;
    }
    v
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI { y - 2.0 * PI } else { y }
}

/// `E_k(f)` in the uniform norm; zero when `k` reaches the degree of `f`.
pub fn best_approx_periodic(f: &PeriodicFunction, k: usize) -> Result<Measured> {
    if k >= f.degree() {
        return Ok(Measured::exact(0.0));
    }
    let r = remez_exchange(f, k)?;
    Ok(Measured {
        value: r.deviation,
        tolerance: r.deviation - r.levelled,
    })
}

/// Runs the exchange iteration for degree `k` regardless of `deg f`.
pub fn remez_exchange(f: &PeriodicFunction, k: usize) -> Result<RemezResult> {
    let n_ref = 2 * k + 2;
    let dim = 2 * k + 1;
    let grid_len = (16 * (f.degree() + k + 1)).max(64);
    let h = 2.0 * PI / grid_len as f64;
    let grid: Vec<f64> = (0..grid_len).map(|i| -PI + h * i as f64).collect();
    let scale = grid.iter().map(|&x| f.evaluate(x).abs()).fold(0.0, f64::max);

    let mut reference: Vec<f64> = (0..n_ref).map(|i| -PI + 2.0 * PI * i as f64 / n_ref as f64).collect();
    let mut row = vec![0.0; dim];

    for iteration in 1..=MAX_EXCHANGE_ITERATIONS {
        // levelled system: t(x_r) + (-1)^r h = f(x_r)
        let mut a = DMatrix::<f64>::zeros(n_ref, n_ref);
        let mut rhs = DVector::<f64>::zeros(n_ref);
        for (r, &x) in reference.iter().enumerate() {
            basis(k, x, &mut row);
            for (c, v) in row.iter().enumerate() {
                a[(r, c)] = *v;
            }
            a[(r, dim)] = if r % 2 == 0 { 1.0 } else { -1.0 };
            rhs[r] = f.evaluate(x);
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NoConvergence(iteration))?;
        let coeffs: Vec<f64> = sol.iter().take(dim).copied().collect();
        let level = sol[dim].abs();
        let err = |x: f64| f.evaluate(x) - approximant(&coeffs, k, x);

        let extrema = signed_extrema(&err, &grid, h);
        let (gi, &(_, gmax)) = extrema
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()).then(b.0.cmp(&a.0)))
            .expect("grid is nonempty");
        let deviation = gmax.abs();

        if deviation <= 1e-13 * scale || deviation - level <= EQUIOSCILLATION_TOL * deviation {
            return Ok(RemezResult {
                deviation,
                levelled: level,
                coefficients: coeffs,
                reference,
                iterations: iteration,
            });
        }

        reference = if extrema.len() >= n_ref {
            select_alternating(extrema, gi, n_ref)
        } else {
            single_exchange(&reference, &err, extrema[gi])
        };
    }
    Err(Error::NoConvergence(MAX_EXCHANGE_ITERATIONS))
}

/// One extremum per cyclic sign run of the error on the grid, each polished
/// on the continuous error. Sorted by position in `[-π, π)`.
fn signed_extrema<F: Fn(f64) -> f64>(err: &F, grid: &[f64], h: f64) -> Vec<(f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|&x| err(x)).collect();
    let n = values.len();
    let sign = |v: f64| v >= 0.0;
    // start at a sign change so runs never straddle the wrap point
    let start = (0..n).find(|&i| sign(values[i]) != sign(values[(i + n - 1) % n]));
    let Some(start) = start else {
        let i = (0..n).max_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs())).unwrap_or(0);
        return vec![polish(err, grid[i], h)];
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let s = sign(values[(start + i) % n]);
        let mut best = (start + i) % n;
        while i < n && sign(values[(start + i) % n]) == s {
            let j = (start + i) % n;
            if values[j].abs() > values[best].abs() {
                best = j;
            }
            i += 1;
        }
        out.push(polish(err, grid[best], h));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn polish<F: Fn(f64) -> f64>(err: &F, x0: f64, h: f64) -> (f64, f64) {
    let (x, _) = golden_max(&mut |x| err(x).abs(), x0 - h, x0 + h, 1e-12);
    let x = wrap(x);
    (x, err(x))
}

/// Drops the weakest extrema in adjacent pairs (which keeps the cyclic sign
/// alternation) until `n_ref` remain; the global maximum is never dropped.
fn select_alternating(mut ext: Vec<(f64, f64)>, keep: usize, n_ref: usize) -> Vec<f64> {
    let keep_x = ext[keep].0;
    while ext.len() > n_ref {
        let m = ext.len();
        let (i, _) = ext
            .iter()
            .enumerate()
            .filter(|(_, e)| e.0 != keep_x)
            .min_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()).then(a.0.cmp(&b.0)))
            .expect("more than one extremum");
        let left = (i + m - 1) % m;
        let right = (i + 1) % m;
        let partner = if ext[left].0 == keep_x {
            right
        } else if ext[right].0 == keep_x {
            left
        } else if ext[left].1.abs() <= ext[right].1.abs() {
            left
        } else {
            right
        };
        let (a, b) = if i > partner { (i, partner) } else { (partner, i) };
        ext.remove(a);
        ext.remove(b);
    }
    ext.into_iter().map(|e| e.0).collect()
}

/// Classical single-point exchange: the new point replaces the neighbouring
/// reference point whose error has the same sign.
fn single_exchange<F: Fn(f64) -> f64>(reference: &[f64], err: &F, new: (f64, f64)) -> Vec<f64> {
    let m = reference.len();
    let mut r = reference.to_vec();
    let (x, e) = new;
    let j = match r.iter().rposition(|&p| p <= x) {
        Some(j) => j,
        None => m - 1,
    };
    let next = (j + 1) % m;
    let slot = if (err(r[j]) >= 0.0) == (e >= 0.0) { j } else { next };
    r[slot] = x;
    r.sort_by(|a, b| a.total_cmp(b));
    r
}
