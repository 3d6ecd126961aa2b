//! Modified Bessel functions of the second kind, the principal Lambert W
//! branch, the auxiliary integrals I, J, L and the profile p(x) = xK1 + x^2 K0.
//!
//! K0 and K1 are computed from the integral representation
//! `K0(x) = ∫_0^∞ e^{-x√(k²+1)} dk/√(k²+1)` after the substitution
//! `k = sinh u`, which turns it into `∫_0^∞ e^{-x cosh u} du`; K1 is its
//! negated x-derivative `∫_0^∞ cosh u e^{-x cosh u} du`. Both are evaluated in
//! exponentially scaled form so that neither tail overflows. The integrands
//! are even, entire and decay doubly exponentially, so the trapezoidal rule
//! with a step matched to the peak width `1/√x` is accurate to rounding.

use std::f64::consts::{E, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{
    integrate_semi_infinite, minimize_scalar, trapezoid_half_line, QuadratureSpec,
};

/// Orders of K exposed by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    One,
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            _ => Err(Error::InvalidInput(format!("only K0 and K1 are exposed, got order {order}"))),
        }
    }
}

/// Above this argument `K` underflows a double.
pub const UNDERFLOW_ARG: f64 = 745.0;

/// Step for trapezoidal sums over `e^{-x(cosh u - 1)}`-type integrands.
pub(crate) fn cosh_decay_step(x: f64) -> f64 {
    (0.5 / x.sqrt()).min(0.2)
}

/// `e^x K_order(x)` for `x > 0`.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", x));
    }
    let decay = move |u: f64| {
        let sh = (0.5 * u).sinh();
        (-2.0 * x * sh * sh).exp()
    };
    let h = cosh_decay_step(x);
    match order {
        BesselOrder::Zero => trapezoid_half_line(decay, h, 1e-18),
        BesselOrder::One => trapezoid_half_line(|u| u.cosh() * decay(u), h, 1e-18),
    }
}

/// Reference evaluation of `e^x K` by adaptive Gauss-Kronrod quadrature.
pub fn bessel_k_scaled_adaptive(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", x));
    }
    let spec = QuadratureSpec::tight();
    // cosh u - 1 = 2 sinh^2(u/2) keeps the exponent accurate near u = 0.
    let decay = move |u: f64| {
        let sh = (0.5 * u).sinh();
        (-2.0 * x * sh * sh).exp()
    };
    match order {
        BesselOrder::Zero => integrate_semi_infinite(decay, decay, 0.0, &spec),
        BesselOrder::One => {
            let f = move |u: f64| u.cosh() * decay(u);
            integrate_semi_infinite(f, f, 0.0, &spec)
        }
    }
}

/// `K_order(x)`; exactly zero past [`UNDERFLOW_ARG`].
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k", x));
    }
    if x > UNDERFLOW_ARG {
        return Ok(0.0);
    }
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}

pub fn k0(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::Zero, x)
}

pub fn k1(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::One, x)
}

const INV_E: f64 = 1.0 / E;

/// Principal branch of the Lambert W function, `W e^W = x` for `x >= -1/e`.
///
/// Halley iteration safeguarded by a bisection bracket; the branch point
/// `x = -1/e` returns exactly `-1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("lambert_w0", x));
    }
    let gap = x + INV_E;
    if gap.abs() <= 4.0 * f64::EPSILON * INV_E {
        return Ok(-1.0);
    }
    if gap < 0.0 {
        return Err(domain("lambert_w0", x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = if x > 0.0 { (0.0, x.min(x.ln().max(1.0))) } else { (-1.0, x) };
    let mut w = if x < -0.32 {
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    w = w.clamp(lo, hi);
    for _ in 0..200 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let mut next = w - f / denom;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 2.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

/// The integrals I, J and L of the mixture-density analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxIntegrals {
    pub i: f64,
    pub j: f64,
    pub l: f64,
}

/// Closed forms `I = πe^{-s}/2`, `J = (π/2)(1+s)e^{-s}`,
/// `L = (π/4)(3+3s+s²)e^{-s}`. With `verify`, each is recomputed by
/// quadrature and must agree to relative `1e-7`.
pub fn aux_integrals(s: f64, verify: bool) -> Result<AuxIntegrals> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("aux_integrals", s));
    }
    let closed = aux_scaled_closed(s);
    if verify {
        let numeric = aux_scaled_quadrature(s)?;
        for (name, c, n) in [
            ("I", closed.i, numeric.i),
            ("J", closed.j, numeric.j),
            ("L", closed.l, numeric.l),
        ] {
            if (c - n).abs() > 1e-7 * c.abs() {
                return Err(Error::VerificationMismatch {
                    quantity: name,
                    closed: c,
                    numeric: n,
                });
            }
        }
    }
    let scale = (-s).exp();
    Ok(AuxIntegrals {
        i: closed.i * scale,
        j: closed.j * scale,
        l: closed.l * scale,
    })
}

/// The same integrals by direct quadrature of their defining forms.
pub fn aux_integrals_quadrature(s: f64) -> Result<AuxIntegrals> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("aux_integrals", s));
    }
    let q = aux_scaled_quadrature(s)?;
    let scale = (-s).exp();
    Ok(AuxIntegrals {
        i: q.i * scale,
        j: q.j * scale,
        l: q.l * scale,
    })
}

fn aux_scaled_closed(s: f64) -> AuxIntegrals {
    AuxIntegrals {
        i: FRAC_PI_2,
        j: FRAC_PI_2 * (1.0 + s),
        l: PI / 4.0 * (3.0 + 3.0 * s + s * s),
    }
}

/// The three integrals times `e^s`, by direct quadrature.
fn aux_scaled_quadrature(s: f64) -> Result<AuxIntegrals> {
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-10,
        ..QuadratureSpec::default()
    };
    let ks = |order, y: f64| bessel_k_scaled(order, y).unwrap_or(f64::NAN);
    if s == 0.0 {
        let env = |y: f64| (1.0 + y).powi(3) * (-y).exp();
        let i = integrate_semi_infinite(|y| y * ks(BesselOrder::One, y) * (-y).exp(), env, 0.0, &spec)?;
        let j = integrate_semi_infinite(|y| y * y * ks(BesselOrder::Zero, y) * (-y).exp(), env, 0.0, &spec)?;
        let l = 0.5 * integrate_semi_infinite(|y| y.powi(3) * ks(BesselOrder::One, y) * (-y).exp(), env, 0.0, &spec)?;
        return Ok(AuxIntegrals { i, j, l });
    }
    // y = s cosh u removes the square-root factors; e^{-s} is pulled out.
    let decay = move |u: f64| {
        let sh = (0.5 * u).sinh();
        (-2.0 * s * sh * sh).exp()
    };
    let env = move |u: f64| u.cosh().powi(5) * decay(u) * (1.0 + 1.0 / s);
    let i = s * s
        * integrate_semi_infinite(
            |u| u.sinh().powi(2) * ks(BesselOrder::One, s * u.cosh()) * decay(u),
            env,
            0.0,
            &spec,
        )?;
    let j = s.powi(3)
        * integrate_semi_infinite(
            |u| u.cosh() * u.sinh().powi(2) * ks(BesselOrder::Zero, s * u.cosh()) * decay(u),
            env,
            0.0,
            &spec,
        )?;
    let l = 0.5
        * s.powi(4)
        * integrate_semi_infinite(
            |u| (u.cosh() * u.sinh()).powi(2) * ks(BesselOrder::One, s * u.cosh()) * decay(u),
            env,
            0.0,
            &spec,
        )?;
    Ok(AuxIntegrals { i, j, l })
}

/// `p(x) = x K1(x) + x² K0(x)`, with the limit `p(0) = 1`.
pub fn p(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    if !(x > 0.0) {
        return Err(domain("p", x));
    }
    Ok(x * k1(x)? + x * x * k0(x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PMax {
    pub x0: f64,
    pub pmax: f64,
}

/// Bracket known to contain the maximizer of `p`.
pub fn p_max_bracket() -> (f64, f64) {
    (0.5, (1.0 + 17f64.sqrt()) / 8.0)
}

/// Maximizes `p` over `[0.1, 2]`.
pub fn find_p_max() -> Result<PMax> {
    let (x0, neg) = minimize_scalar(|x| -p(x).unwrap_or(f64::NEG_INFINITY), 0.1, 2.0, 1e-10);
    let (lo, hi) = p_max_bracket();
    if !(x0 > lo && x0 < hi) {
        return Err(Error::BracketViolation { value: x0, lo, hi });
    }
    Ok(PMax { x0, pmax: -neg })
}
