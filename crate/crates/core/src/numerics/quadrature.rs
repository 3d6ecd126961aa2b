use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerance contract shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Semi-infinite integrals are cut where the caller's envelope drops below this.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            tail_cut: 1e-16,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            ..Default::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Near machine precision; used by the special functions.
    pub fn tight() -> Self {
        QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
            tail_cut: 1e-18,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidInput(format!(
                "quadrature spec needs positive tolerances and at least one subdivision: {self:?}"
            )));
        }
        if !(self.tail_cut > 0.0) {
            return Err(Error::InvalidInput("tail_cut must be positive".into()));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let res_asc = res_asc * half.abs();
    let res_abs = res_abs * half.abs();
    let value = kronrod * half;

    // QUADPACK error rescaling.
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimate falls below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::InvalidInput(format!(
            "integration limits must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let first = gauss_kronrod_15(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut settled_value = 0.0;
    let mut settled_err = 0.0;

    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::SubdivisionLimit {
                a,
                b,
                limit: spec.max_subdivisions,
                estimate: total_err,
            });
        }
        let Some(worst) = heap.pop() else {
            // Everything left is below resolution; accept what we have.
            return Ok(total);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
            settled_value += worst.value;
            settled_err += worst.error;
            if heap.is_empty() {
                if settled_err <= 10.0 * spec.abs_tol.max(spec.rel_tol * total.abs()) {
                    return Ok(settled_value);
                }
                return Err(Error::SubdivisionLimit {
                    a,
                    b,
                    limit: spec.max_subdivisions,
                    estimate: settled_err,
                });
            }
            continue;
        }
        let left = gauss_kronrod_15(&f, worst.a, mid)?;
        let right = gauss_kronrod_15(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // Re-sum to keep drift from the running updates out of the test.
            total = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_err = settled_err + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }
}

/// Integrates over `[a, b]` split at the interior `breaks`, which should sit
/// at kinks or endpoint-type singularities of `f`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut edges = Vec::with_capacity(points.len() + 2);
    edges.push(a);
    edges.extend(points);
    edges.push(b);
    let mut sum = 0.0;
    for w in edges.windows(2) {
        sum += integrate_adaptive(&f, w[0], w[1], spec)?;
    }
    Ok(sum)
}

/// Trapezoidal sum `h (f(0)/2 + Σ_{k≥1} f(kh))` for `∫_0^∞ f`.
///
/// For even integrands analytic in a strip around the real axis and decaying
/// at least exponentially the error falls like `exp(-c/h)`, so a fixed step
/// beats adaptive bisection by a wide margin. Summation stops once the
/// terms are decreasing and below `rel_cut` times the running sum.
pub fn trapezoid_half_line<F: Fn(f64) -> f64>(f: F, h: f64, rel_cut: f64) -> Result<f64> {
    let mut sum = 0.5 * f(0.0);
    let mut prev = sum.abs() * 2.0;
    for k in 1..MAX_TRAPEZOID_TERMS {
        let v = f(h * k as f64);
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("integrand is not finite at {}", h * k as f64)));
        }
        sum += v;
        if v.abs() <= prev && v.abs() <= rel_cut * sum.abs() {
            return Ok(sum * h);
        }
        prev = v.abs();
    }
    Err(Error::TailNotDecaying {
        tail_cut: rel_cut,
        ceiling: h * MAX_TRAPEZOID_TERMS as f64,
    })
}

const MAX_TRAPEZOID_TERMS: usize = 1 << 20;

/// Largest finite cutoff probed before giving up on a tail.
const TAIL_CEILING: f64 = 1e12;

/// `∫_a^∞ f`, truncated where the caller's magnitude `envelope` falls below
/// `spec.tail_cut`. The envelope must eventually decrease monotonically.
pub fn integrate_semi_infinite<F, E>(f: F, envelope: E, a: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let b = tail_cutoff(&envelope, a, spec.tail_cut)?;
    integrate_adaptive(f, a, b, spec)
}

pub(crate) fn tail_cutoff<E: Fn(f64) -> f64>(envelope: &E, a: f64, tail_cut: f64) -> Result<f64> {
    let mut step = 1.0;
    let mut lo = a;
    while envelope(a + step) > tail_cut {
        lo = a + step;
        step *= 2.0;
        if step > TAIL_CEILING {
            return Err(Error::TailNotDecaying {
                tail_cut,
                ceiling: TAIL_CEILING,
            });
        }
    }
    let mut hi = a + step;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid) > tail_cut {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-3 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_sine() {
        let spec = QuadratureSpec::default();
        let one = integrate_adaptive(|_| 1.0, 0.0, 1.0, &spec).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let two = integrate_adaptive(f64::sin, 0.0, PI, &spec).unwrap();
        assert!((two - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hat_first_moment_is_one_eighth() {
        let hat = |w: f64| 2.0 / PI * (w.acos() - w * (1.0 - w * w).sqrt());
        let v = integrate_adaptive(|w| hat(w) * w, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 0.125).abs() < 1e-10, "{v}");
    }

    #[test]
    fn semi_infinite_exponentials() {
        let spec = QuadratureSpec::default();
        let v = integrate_semi_infinite(|x| (-x).exp(), |x| (-x).exp(), 0.0, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let v = integrate_semi_infinite(|x| x * (-x).exp(), |x| x * (-x).exp(), 0.0, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn arctan_integral_truncates_algebraic_tail() {
        // The envelope 1/(k^2+1) reaches 1e-16 near k = 1e8, so the cut tail is ~1e-8.
        let f = |k: f64| 1.0 / (k * k + 1.0);
        let v = integrate_semi_infinite(f, f, 0.0, &QuadratureSpec::default()).unwrap();
        assert!((v - PI / 2.0).abs() < 2e-8, "{}", v - PI / 2.0);
    }

    #[test]
    fn trapezoid_is_spectral_on_gaussians() {
        let v = trapezoid_half_line(|x| (-x * x).exp(), 0.3, 1e-18).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!(trapezoid_half_line(|_| 1.0, 1.0, 1e-18).is_err());
    }

    #[test]
    fn non_decaying_envelope_is_reported() {
        let err = integrate_semi_infinite(|_| 1.0, |_| 1.0, 0.0, &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::TailNotDecaying { .. })));
    }

    #[test]
    fn subdivision_limit_is_reported() {
        let spec = QuadratureSpec::new(1e-15, 1e-15, 3).unwrap();
        let err = integrate_adaptive(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &spec);
        assert!(matches!(err, Err(Error::SubdivisionLimit { .. })));
    }

    #[test]
    fn breaks_handle_kinks() {
        let v = integrate_with_breaks(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], &QuadratureSpec::default())
            .unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 0).is_err());
    }
}
