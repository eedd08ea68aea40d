//! Scan-then-refine scalar minimization.

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

const DEFAULT_SCAN: usize = 201;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[a, b]`: a uniform scan of 201 points locates the best
/// grid cell, then golden-section search refines inside the neighbouring cells.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Minimum {
    minimize_scalar_with(f, a, b, tol, DEFAULT_SCAN)
}

/// Same as [`minimize_scalar`] with an explicit scan size (at least 201).
///
/// The returned value never exceeds the best scanned value. Non-finite
/// samples are treated as `+inf`.
pub fn minimize_scalar_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    scan_points: usize,
) -> Minimum {
    assert!(a < b, "minimize_scalar needs a < b");
    let n = scan_points.max(DEFAULT_SCAN);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let step = (b - a) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { b } else { a + step * i as f64 };

    let mut best = Minimum { x: a, value: f64::INFINITY };
    let mut best_i = 0;
    for i in 0..n {
        let x = grid(i);
        let v = eval(x);
        if v < best.value {
            best = Minimum { x, value: v };
            best_i = i;
        }
    }

    let mut lo = grid(best_i.saturating_sub(1));
    let mut hi = grid((best_i + 1).min(n - 1));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut iterations = 0;
    while (hi - lo) > tol && iterations < 200 {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    let mid = 0.5 * (lo + hi);
    let vm = eval(mid);
    if vm < best.value {
        best = Minimum { x: mid, value: vm };
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parabola() {
        let m = minimize_scalar(|x| (x - 3.0).powi(2), 0.0, 10.0, 1e-10);
        assert!((m.x - 3.0).abs() < 1e-8);
    }

    #[test]
    fn sine_on_full_period() {
        let m = minimize_scalar(f64::sin, 0.0, 2.0 * PI, 1e-10);
        assert!((m.x - 1.5 * PI).abs() < 1e-6);
        assert!((m.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn finds_global_minimum_of_oscillatory_function() {
        // Many local minima; global one at x = 7.
        let f = |x: f64| (x - 7.0).powi(2) * 0.01 - (20.0 * (x - 7.0)).cos();
        let m = minimize_scalar_with(f, 0.0, 10.0, 1e-10, 2001);
        assert!((m.x - 7.0).abs() < 1e-6);
    }

    #[test]
    fn never_worse_than_scan() {
        let f = |x: f64| (5.0 * x).sin() + 0.1 * x;
        let m = minimize_scalar(f, -3.0, 3.0, 1e-9);
        let step = 6.0 / 200.0;
        let grid_min = (0..201).map(|i| f(-3.0 + step * i as f64)).fold(f64::INFINITY, f64::min);
        assert!(m.value <= grid_min);
    }

    #[test]
    fn boundary_minimum() {
        let m = minimize_scalar(|x| x, 1.0, 2.0, 1e-10);
        assert_eq!(m.x, 1.0);
    }
}
