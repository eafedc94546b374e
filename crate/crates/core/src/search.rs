//! Time-grid scans with local refinement, shared by the transfer and mixing
//! scans.

use rayon::prelude::*;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Evaluates `f` on `0, step, 2·step, …` up to and including `end`.
/// Evaluation is data-parallel; the result is independent of thread count.
pub(crate) fn sample<F>(f: &F, start: f64, end: f64, step: f64) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let count = ((end - start) / step).floor() as usize + 1;
    (0..count)
        .into_par_iter()
        .map(|k| {
            let t = (start + k as f64 * step).min(end);
            (t, f(t))
        })
        .collect()
}

/// Indices of interior local minima (plateaus report their first point),
/// plus the endpoints when they are lower than their single neighbour.
pub(crate) fn local_minima(values: &[(f64, f64)]) -> Vec<usize> {
    let n = values.len();
    if n < 2 {
        return (0..n).collect();
    }
    let mut out = Vec::new();
    if values[0].1 < values[1].1 {
        out.push(0);
    }
    for i in 1..n - 1 {
        if values[i].1 < values[i - 1].1 && values[i].1 <= values[i + 1].1 {
            out.push(i);
        }
    }
    if values[n - 1].1 < values[n - 2].1 {
        out.push(n - 1);
    }
    out
}

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Refines the grid minimum at `values[i]`: a three-point quadratic fit
/// proposes a vertex, then golden section runs on the bracketing cell pair.
pub(crate) fn refine_min<F: Fn(f64) -> f64>(
    f: &F,
    values: &[(f64, f64)],
    i: usize,
    tol: f64,
) -> (f64, f64) {
    let lo = values[i.saturating_sub(1)].0;
    let hi = values[(i + 1).min(values.len() - 1)].0;
    let mut best = values[i];
    if i > 0 && i + 1 < values.len() {
        let (x0, y0) = values[i - 1];
        let (x1, y1) = values[i];
        let (x2, y2) = values[i + 1];
        let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
        let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
        if a > 0.0 {
            let xv = -b / (2.0 * a);
            if xv > lo && xv < hi {
                let fv = f(xv);
                if fv < best.1 {
                    best = (xv, fv);
                }
            }
        }
    }
    if hi > lo {
        let g = golden_min(f, lo, hi, tol);
        if g.1 < best.1 {
            best = g;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_v_shaped_minimum() {
        let f = |x: f64| (x - 0.3).abs();
        let (x, fx) = golden_min(&f, 0.0, 1.0, 1e-13);
        assert!((x - 0.3).abs() < 1e-12);
        assert!(fx < 1e-12);
    }

    #[test]
    fn refine_improves_on_grid() {
        let f = |x: f64| (x - 1.234_567).powi(2);
        let values = sample(&f, 0.0, 3.0, 0.1);
        let mins = local_minima(&values);
        assert_eq!(mins.len(), 1);
        let (x, _) = refine_min(&f, &values, mins[0], 1e-12);
        assert!((x - 1.234_567).abs() < 1e-6);
    }

    #[test]
    fn sample_includes_endpoint() {
        let values = sample(&|x| x, 0.0, 1.0, 0.25);
        assert_eq!(values.len(), 5);
        assert_eq!(values.last().unwrap().0, 1.0);
    }
}
