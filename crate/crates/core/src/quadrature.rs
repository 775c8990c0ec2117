//! Gauss–Kronrod quadrature with adaptive subdivision.
//!
//! Three drivers share the same 7/15-point rule:
//!
//! * [`integrate`] is a global adaptive scheme: the subinterval with the
//!   largest error estimate is bisected until the total error meets the
//!   requested tolerance.
//! * [`integrate_uniform`] walks a regular initial partition panel by panel
//!   and refines each panel locally against a tolerance proportional to its
//!   length. It never stores the partition, so it can handle millions of
//!   panels on long oscillatory ranges.
//! * [`integrate_cells`] returns the integral over every cell of a given
//!   partition, with the tolerance distributed by cell length.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

// Kronrod abscissae on [-1, 1] (nonnegative half, descending). Odd indices
// are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One application of the 7/15-point rule on `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T> {
    pub a: f64,
    pub b: f64,
    pub value: T,
    pub error: f64,
    /// Integral of the magnitude, used to scale tolerances.
    pub abs_value: f64,
}

/// Applies the Gauss–Kronrod 7/15 rule with the QUADPACK error rescaling.
pub fn gauss_kronrod<T, F>(f: &mut F, a: f64, b: f64) -> Segment<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.magnitude() * WGK[7];
    let mut fv1 = [T::default(); 7];
    let mut fv2 = [T::default(); 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

/// Tolerance settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 0.0,
            rel: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

struct Ranked<T>(Segment<T>);

impl<T> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}

impl<T> Eq for Ranked<T> {}

impl<T> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Ranked<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Global adaptive integration of `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Integral<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if a == b {
        return Ok(Integral {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let first = gauss_kronrod(&mut f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut abs_total = first.abs_value;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Ranked(first));
    let mut subdivisions = 0;

    loop {
        // Roundoff floor relative to the integral of |f|.
        let target = tol
            .abs
            .max(tol.rel * value.magnitude())
            .max(100.0 * f64::EPSILON * abs_total);
        if error <= target {
            break;
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                achieved: error,
                requested: target,
                subdivisions,
            });
        }
        let Some(Ranked(worst)) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        value = value - worst.value + left.value + right.value;
        error += left.error + right.error - worst.error;
        abs_total += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(Ranked(left));
        heap.push(Ranked(right));
    }

    // Re-sum to remove drift from the running updates.
    let mut total = T::default();
    let mut total_err = 0.0;
    for Ranked(s) in heap.iter() {
        total = total + s.value;
        total_err += s.error;
    }
    Ok(Integral {
        value: total,
        error: total_err,
        evaluations,
        subdivisions,
    })
}

struct LocalStats {
    evaluations: usize,
    subdivisions: usize,
    budget: usize,
    unmet: bool,
}

impl LocalStats {
    fn new(budget: usize) -> Self {
        Self {
            evaluations: 0,
            subdivisions: 0,
            budget,
            unmet: false,
        }
    }
}

fn refine_local<T, F>(
    f: &mut F,
    seg: Segment<T>,
    tol: f64,
    depth: u32,
    stats: &mut LocalStats,
) -> (T, f64)
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if seg.error <= tol {
        return (seg.value, seg.error);
    }
    if depth == 0 || stats.subdivisions >= stats.budget {
        stats.unmet = true;
        return (seg.value, seg.error);
    }
    let mid = 0.5 * (seg.a + seg.b);
    let left = gauss_kronrod(f, seg.a, mid);
    let right = gauss_kronrod(f, mid, seg.b);
    stats.evaluations += 30;
    stats.subdivisions += 1;
    let (vl, el) = refine_local(f, left, 0.5 * tol, depth - 1, stats);
    let (vr, er) = refine_local(f, right, 0.5 * tol, depth - 1, stats);
    (vl + vr, el + er)
}

/// Integrates over `[a, b]` split into panels of width at most `panel_width`,
/// refining each panel against `abs_tol * (panel length) / (b - a)`.
///
/// Panel sums are accumulated with compensated summation. At most
/// `max_subdivisions` bisections are spent over the whole range.
pub fn integrate_uniform<T, F>(
    mut f: F,
    a: f64,
    b: f64,
    panel_width: f64,
    abs_tol: f64,
    max_depth: u32,
    max_subdivisions: usize,
) -> Result<Integral<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(panel_width > 0.0) || !(b > a) {
        return Err(Error::InvalidArguments(format!(
            "uniform quadrature needs b > a and panel width > 0 (a = {a}, b = {b}, width = {panel_width})"
        )));
    }
    let length = b - a;
    let panels = (length / panel_width).ceil().max(1.0) as usize;
    let width = length / panels as f64;
    let per_panel = abs_tol / panels as f64;
    let mut stats = LocalStats::new(max_subdivisions);
    let mut sum = T::default();
    let mut comp = T::default();
    let mut error = 0.0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
        let seg = gauss_kronrod(&mut f, lo, hi);
        stats.evaluations += 15;
        let (v, e) = refine_local(&mut f, seg, per_panel, max_depth, &mut stats);
        // Kahan step
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        error += e;
    }
    if stats.unmet && error > abs_tol {
        return Err(Error::ToleranceNotMet {
            achieved: error,
            requested: abs_tol,
            subdivisions: stats.subdivisions,
        });
    }
    Ok(Integral {
        value: sum,
        error,
        evaluations: stats.evaluations,
        subdivisions: stats.subdivisions,
    })
}

/// Integrals of `f` over each cell `[nodes[i], nodes[i+1]]`.
///
/// The total error target is `rel_tol` times the integral of `|f|` over the
/// whole partition, distributed over cells in proportion to their length.
pub fn integrate_cells<T, F>(
    mut f: F,
    nodes: &[f64],
    rel_tol: f64,
    max_depth: u32,
) -> Result<(Vec<T>, f64)>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if nodes.len() < 2 {
        return Ok((Vec::new(), 0.0));
    }
    let first: Vec<Segment<T>> = nodes
        .windows(2)
        .map(|w| gauss_kronrod(&mut f, w[0], w[1]))
        .collect();
    let scale: f64 = first.iter().map(|s| s.abs_value).sum();
    let length = nodes[nodes.len() - 1] - nodes[0];
    let target = rel_tol * scale;
    let mut stats = LocalStats::new(usize::MAX);
    let mut values = Vec::with_capacity(first.len());
    let mut error = 0.0;
    for seg in first {
        let tol = target * (seg.b - seg.a) / length;
        let (v, e) = refine_local(&mut f, seg, tol, max_depth, &mut stats);
        values.push(v);
        error += e;
    }
    if stats.unmet && error > target {
        return Err(Error::ToleranceNotMet {
            achieved: error,
            requested: target,
            subdivisions: stats.subdivisions,
        });
    }
    Ok((values, error))
}
