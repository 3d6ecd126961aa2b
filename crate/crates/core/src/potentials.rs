//! Euclid's hat, the standard kernel `w K1(w)`, the mixture profile `m(s)`
//! with density `g(s) = m(s)/(2πs)`, and windowed scale mixtures.

use std::f64::consts::{FRAC_2_PI, PI};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_adaptive, integrate_semi_infinite, trapezoid_half_line, QuadratureSpec};
use crate::specfun::{bessel_k, bessel_k_scaled, cosh_decay_step, BesselOrder};

/// Per-scale kernel of a decomposition of the Yukawa potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    /// `h(w)`, supported on `[0, 1]`, mixed with density `m(s)/(2πs)`.
    EuclidHat,
    /// `w K1(w)`, supported on all of `[0, ∞)`, mixed with density `1/(2πs)`.
    StandardBessel,
}

impl KernelKind {
    /// Kernel value at `w >= 0`, using the interpolated standard kernel.
    pub fn kernel(self, w: f64) -> f64 {
        match self {
            KernelKind::EuclidHat => hat(w),
            KernelKind::StandardBessel => standard_kernel_fast(w),
        }
    }

    pub fn density(self) -> MixtureDensity {
        MixtureDensity { kind: self }
    }

    /// Kernel support edge, if compact.
    pub fn support(self) -> Option<f64> {
        match self {
            KernelKind::EuclidHat => Some(1.0),
            KernelKind::StandardBessel => None,
        }
    }
}

/// Scale interval `[t0, t1]` of a cut-off decomposition; `t1` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleWindow {
    pub t0: f64,
    pub t1: f64,
}

impl ScaleWindow {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 < t1) || t0.is_infinite() {
            return Err(Error::InvalidInput(format!(
                "scale window needs 0 < t0 < t1, got ({t0}, {t1})"
            )));
        }
        Ok(ScaleWindow { t0, t1 })
    }

    pub fn to_infinity(t0: f64) -> Result<Self> {
        Self::new(t0, f64::INFINITY)
    }

    pub fn is_unbounded(&self) -> bool {
        self.t1.is_infinite()
    }
}

/// Mixture density of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureDensity {
    pub kind: KernelKind,
}

impl MixtureDensity {
    /// Density at scale `s > 0`.
    pub fn at(&self, s: f64) -> f64 {
        match self.kind {
            KernelKind::EuclidHat => mixture_m_fast(s) / (2.0 * PI * s),
            KernelKind::StandardBessel => 1.0 / (2.0 * PI * s),
        }
    }
}

pub(crate) fn hat(w: f64) -> f64 {
    if w >= 1.0 {
        0.0
    } else if w <= 0.0 {
        1.0
    } else {
        FRAC_2_PI * (w.acos() - w * (1.0 - w * w).sqrt())
    }
}

/// Euclid's hat `(2/π)(arccos w - w√(1-w²))` on `[0, 1]`, zero beyond.
pub fn euclid_hat(w: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(domain("euclid_hat", w));
    }
    Ok(hat(w))
}

/// Derivative of the hat, `-(4/π)√(1-w²)` inside the support.
pub fn euclid_hat_derivative(w: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(domain("euclid_hat_derivative", w));
    }
    Ok(if w >= 1.0 { 0.0 } else { -2.0 * FRAC_2_PI * (1.0 - w * w).sqrt() })
}

/// `w K1(w)` with the limit value 1 at `w = 0`.
pub fn standard_kernel(w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(1.0);
    }
    if !(w > 0.0) {
        return Err(domain("standard_kernel", w));
    }
    Ok(w * bessel_k(BesselOrder::One, w)?)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Quadratic coefficient of `m` at the origin, `(-1 - 2γ + 4 ln 2)/8`.
pub const M_ORIGIN_COEFF: f64 = (-1.0 - 2.0 * EULER_GAMMA + 4.0 * std::f64::consts::LN_2) / 8.0;

/// `m(s) = ∫_0^∞ (k²+1) (s³/2) K1(s√(k²+1)) dk`, evaluated with `k = sinh v`
/// and the factor `e^{-s}` split off.
pub fn mixture_m(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("mixture_m", s));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let s3 = 0.5 * s * s * s;
    let decay = move |v: f64| {
        let sh = (0.5 * v).sinh();
        (-2.0 * s * sh * sh).exp()
    };
    let f = move |v: f64| {
        let c = v.cosh();
        s3 * c * c * c * bessel_k_scaled(BesselOrder::One, s * c).unwrap_or(f64::NAN) * decay(v)
    };
    // Same analytic, doubly decaying structure as the K integrals.
    Ok(trapezoid_half_line(f, cosh_decay_step(s), 1e-18)? * (-s).exp())
}

/// `m(s) = -(s²/2) ∫_s^∞ K0'''(r) r/√(r²-s²) dr` with `r = s cosh u`; kept as
/// an independent cross-check of [`mixture_m`].
pub fn mixture_m_raw(s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("mixture_m_raw", s));
    }
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
        tail_cut: 1e-20,
    };
    // -K0'''(y) = K1 + K0/y + 2 K1/y², scaled by e^{y}.
    let minus_k0_triple = |y: f64| {
        let a = bessel_k_scaled(BesselOrder::Zero, y).unwrap_or(f64::NAN);
        let b = bessel_k_scaled(BesselOrder::One, y).unwrap_or(f64::NAN);
        b + a / y + 2.0 * b / (y * y)
    };
    let decay = move |u: f64| {
        let sh = (0.5 * u).sinh();
        (-2.0 * s * sh * sh).exp()
    };
    let f = |u: f64| u.cosh() * minus_k0_triple(s * u.cosh()) * decay(u);
    let env = |u: f64| u.cosh() * (1.0 + 3.0 / (s * s)) * decay(u);
    Ok(0.5 * s.powi(3) * integrate_semi_infinite(f, env, 0.0, &spec)? * (-s).exp())
}

/// `g(s) = m(s)/(2πs)`.
pub fn mixture_g(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("mixture_g", s));
    }
    Ok(mixture_m(s)? / (2.0 * PI * s))
}

/// Two-dimensional Yukawa potential `K0(r)/(2π)`.
pub fn yukawa_v(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain("yukawa_v", r));
    }
    Ok(bessel_k(BesselOrder::Zero, r)? / (2.0 * PI))
}

/// Lagrange interpolation table on a uniform grid in `ln x`.
struct LogTable {
    u0: f64,
    du: f64,
    values: Vec<f64>,
}

const STENCIL: usize = 6;

impl LogTable {
    fn build<F: Fn(f64) -> f64 + Sync>(lo: f64, hi: f64, per_decade: usize, f: F) -> Self {
        let u0 = lo.ln();
        let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize + 1;
        let du = (hi.ln() - u0) / (n - 1) as f64;
        let values = (0..n).into_par_iter().map(|i| f((u0 + du * i as f64).exp())).collect();
        LogTable { u0, du, values }
    }

    fn eval(&self, x: f64) -> f64 {
        let pos = (x.ln() - self.u0) / self.du;
        let n = self.values.len();
        let start = (pos.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
        let mut sum = 0.0;
        for j in 0..STENCIL {
            let mut w = 1.0;
            let pj = (start + j) as f64;
            for k in 0..STENCIL {
                if k != j {
                    let pk = (start + k) as f64;
                    w *= (pos - pk) / (pj - pk);
                }
            }
            sum += w * self.values[start + j];
        }
        sum
    }
}

const M_TABLE_LO: f64 = 1e-8;
const M_TABLE_HI: f64 = 60.0;

fn m_table() -> &'static LogTable {
    static TABLE: OnceLock<LogTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        LogTable::build(M_TABLE_LO, M_TABLE_HI, 200, |s| {
            mixture_m(s).expect("m is finite on the table range").ln()
        })
    })
}

/// `m(s)` from a cached table of `ln m` (relative accuracy ~1e-11),
/// falling back to the origin asymptotics or direct quadrature off the table.
pub fn mixture_m_fast(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s < M_TABLE_LO {
        return 1.0 + (M_ORIGIN_COEFF - 0.25 * s.ln()) * s * s;
    }
    if s > M_TABLE_HI {
        return mixture_m(s).unwrap_or(0.0);
    }
    m_table().eval(s).exp()
}

const HT_TABLE_LO: f64 = 1e-6;
const HT_TABLE_HI: f64 = 60.0;

fn standard_table() -> &'static LogTable {
    static TABLE: OnceLock<LogTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        LogTable::build(HT_TABLE_LO, HT_TABLE_HI, 200, |w| {
            standard_kernel(w).expect("w K1(w) is finite on the table range").ln()
        })
    })
}

/// `w K1(w)` from a cached table, with the small-argument expansion below
/// `1e-6`.
pub fn standard_kernel_fast(w: f64) -> f64 {
    if w <= 0.0 {
        return 1.0;
    }
    if w < HT_TABLE_LO {
        return 1.0 + 0.5 * w * w * ((0.5 * w).ln() + EULER_GAMMA) - 0.25 * w * w;
    }
    if w > HT_TABLE_HI {
        return standard_kernel(w).unwrap_or(0.0);
    }
    standard_table().eval(w).exp()
}

fn windowed_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
        tail_cut: 1e-18,
    }
}

/// `∫_{t0}^{t1} kernel(r/s) density(s) ds`.
///
/// For the hat the lower limit is raised to `max(t0, r)`. An unbounded
/// window is split at `s = 1`, the tail being cut by the exponential
/// envelope of `m`; the standard kernel admits only bounded windows.
pub fn windowed_v(kind: KernelKind, window: ScaleWindow, r: f64) -> Result<f64> {
    windowed_v_with(kind, window, r, &windowed_spec())
}

pub fn windowed_v_with(kind: KernelKind, window: ScaleWindow, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("windowed_v", r));
    }
    let ScaleWindow { t0, t1 } = window;
    match kind {
        KernelKind::EuclidHat => {
            let lower = t0.max(r);
            if lower >= t1 {
                return Ok(0.0);
            }
            let split = if t1.is_infinite() { lower.max(1.0) } else { t1 };
            // s = e^u absorbs the 1/s behaviour of the density.
            let body = |u: f64| {
                let s = u.exp();
                hat(r / s) * mixture_m_fast(s) / (2.0 * PI)
            };
            let mut v = integrate_adaptive(body, lower.ln(), split.ln(), spec)?;
            if t1.is_infinite() {
                let tail = |s: f64| hat(r / s) * mixture_m_fast(s) / (2.0 * PI * s);
                let env = |s: f64| 0.25 * (-s).exp() * (3.0 + 3.0 * s + s * s) / (2.0 * s);
                v += integrate_semi_infinite(tail, env, split, spec)?;
            }
            Ok(v)
        }
        KernelKind::StandardBessel => {
            if t1.is_infinite() {
                return Err(Error::InvalidInput(
                    "the standard decomposition diverges on an unbounded window".into(),
                ));
            }
            let body = |u: f64| standard_kernel_fast(r * (-u).exp()) / (2.0 * PI);
            integrate_adaptive(body, t0.ln(), t1.ln(), spec)
        }
    }
}
