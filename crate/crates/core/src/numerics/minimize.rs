use crate::error::{Error, Result};

const COARSE_POINTS: usize = 1024;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[lo, hi]`: best point of a 1024-point grid, refined by
/// golden-section search on the neighbouring grid cells.
///
/// Always returns the best candidate seen, including grid endpoints.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let grid = |i: usize| if i == COARSE_POINTS - 1 { hi } else { lo + step * i as f64 };
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for i in 0..COARSE_POINTS {
        let v = f(grid(i));
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let mut a = grid(best_i.saturating_sub(1));
    let mut b = grid((best_i + 1).min(COARSE_POINTS - 1));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()));
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if fx < best_f {
        (x, fx)
    } else {
        (grid(best_i), best_f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Compass search: each coordinate is probed at `±step`, improving moves are
/// accepted, and the step halves when a sweep fails. Stops once the step is
/// below `tol`; optional box bounds clamp every probe.
pub fn coordinate_descent<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: f64,
    tol: f64,
    bounds: Option<(f64, f64)>,
    max_iterations: usize,
) -> Result<DescentOutcome> {
    let clamp = |v: f64| match bounds {
        Some((lo, hi)) => v.clamp(lo, hi),
        None => v,
    };
    let mut x: Vec<f64> = start.iter().map(|&v| clamp(v)).collect();
    let mut value = f(&x);
    let mut step = step;
    let mut iterations = 0;
    while step >= tol {
        if iterations >= max_iterations {
            return Err(Error::OptimizerStall {
                iterations: max_iterations,
            });
        }
        iterations += 1;
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                let trial = clamp(old + dir * step);
                if trial == old {
                    continue;
                }
                x[i] = trial;
                let v = f(&x);
                if v < value {
                    value = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(DescentOutcome {
        x,
        value,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = minimize_scalar(|x| (x - 2.0).powi(2), 0.0, 4.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-8);
        assert!(v < 1e-15);
    }

    #[test]
    fn boundary_minimum() {
        let (x, v) = minimize_scalar(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!((x, v), (0.0, 0.0));
        let (x, _) = minimize_scalar(|x| -x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn descent_on_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let out = coordinate_descent(f, &[0.0, 0.0], 0.25, 1e-9, None, 10_000).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-8 && (out.x[1] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn descent_respects_bounds() {
        let out = coordinate_descent(|x: &[f64]| x[0], &[0.5], 0.1, 1e-9, Some((0.0, 1.0)), 1000).unwrap();
        assert_eq!(out.x[0], 0.0);
    }

    #[test]
    fn descent_budget() {
        let err = coordinate_descent(|x: &[f64]| x[0] * x[0], &[5.0], 1.0, 1e-12, None, 3);
        assert!(matches!(err, Err(Error::OptimizerStall { iterations: 3 })));
    }
}
