//! Sampled maximization with local golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns the best point seen (including the endpoints) and its value.
pub fn golden_max<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Outcome of a grid search followed by local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sup {
    pub value: f64,
    pub argmax: f64,
    /// Gain of the refinement pass over the best grid value.
    pub refinement_gain: f64,
}

/// Supremum of `f` over `[a, b]` sampled at `points + 1` equispaced nodes,
/// then refined by golden-section search around the `peaks` largest local
/// maxima of the sample.
pub fn sup_on_grid<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: usize, peaks: usize) -> Sup {
    let points = points.max(2);
    let h = (b - a) / points as f64;
    let samples: Vec<f64> = (0..=points).map(|i| f(a + h * i as f64)).collect();
    let sup = refine_samples(&mut f, a, h, &samples, peaks, 1e-12 * (b - a).abs().max(1.0));
    sup
}

/// Refines the sampled maxima of `samples` (taken at `a + i*h`).
pub(crate) fn refine_samples<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    h: f64,
    samples: &[f64],
    peaks: usize,
    x_tol: f64,
) -> Sup {
    let last = samples.len() - 1;
    let (grid_arg, grid_best) = samples
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let mut maxima: Vec<usize> = (0..=last)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { samples[i - 1] };
            let right = if i == last { f64::NEG_INFINITY } else { samples[i + 1] };
            samples[i] >= left && samples[i] >= right
        })
        .collect();
    // Ties are resolved toward the leftmost candidate.
    maxima.sort_by(|&i, &j| samples[j].total_cmp(&samples[i]).then(i.cmp(&j)));
    maxima.truncate(peaks.max(1));

    let mut best = (a + h * grid_arg as f64, grid_best);
    for i in maxima {
        let lo = a + h * i.saturating_sub(1) as f64;
        let hi = a + h * (i + 1).min(last) as f64;
        let (x, v) = golden_max(f, lo, hi, x_tol);
        if v > best.1 {
            best = (x, v);
        }
    }
    Sup {
        value: best.1,
        argmax: best.0,
        refinement_gain: best.1 - grid_best,
    }
}
