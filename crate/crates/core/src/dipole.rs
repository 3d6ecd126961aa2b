//! Neutral pairs inside larger clusters: disc-lens geometry behind the hat,
//! the mass of the hat difference `Δ`, and the `Ã₂` bound over the cutoff.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{exp_weighted_integral, integrate_adaptive, QuadratureSpec, RngStream};
use crate::potentials::{hat, mixture_m_fast};

/// Two discs of radius `disc_radius` whose centres are `center_distance` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensGeometry {
    pub disc_radius: f64,
    pub center_distance: f64,
}

impl LensGeometry {
    pub fn area(&self) -> f64 {
        disc_intersection(self.disc_radius, self.disc_radius, self.center_distance)
    }
}

/// Overlap of two discs of diameter `s` at distance `d`, `(πs²/4) h(d/s)`.
pub fn lens_area(s: f64, d: f64) -> Result<f64> {
    if !(s > 0.0) || !(d >= 0.0) {
        return Err(Error::InvalidInput(format!("lens needs s > 0 and d >= 0, got ({s}, {d})")));
    }
    let w = d / s;
    if w >= 1.0 {
        return Ok(0.0);
    }
    Ok(0.5 * s * s * (w.acos() - w * (1.0 - w * w).sqrt()))
}

/// Area of `B_{r1}(0) ∩ B_{r2}(d e_1)`.
pub fn disc_intersection(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

/// `2 A B` at centre distance `rho`, with `A` the overlap of discs of
/// diameters `s`, `s_tilde` and `B = π s̃²/4 - A`.
fn two_ab(s: f64, s_tilde: f64, rho: f64) -> f64 {
    let a = disc_intersection(0.5 * s, 0.5 * s_tilde, rho);
    let b = 0.25 * PI * s_tilde * s_tilde - a;
    2.0 * a * b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMass {
    pub estimate: f64,
    pub stderr: f64,
    /// `π² s̃³ s / 8`.
    pub bound: f64,
    /// Radial quadrature of the same integral.
    pub quadrature: f64,
}

/// `∬ |Δ| dx₁ dx₂ = (4/(π s̃²)) ∫ 2AB d²ρ` over the shell
/// `(s - s̃)/2 < ρ < (s + s̃)/2`, by Monte Carlo with a quadrature cross-check.
pub fn delta_mass(s: f64, s_tilde: f64, seed: RngStream, samples: usize) -> Result<DeltaMass> {
    if !(s_tilde > 0.0 && s_tilde < s) || s.is_infinite() {
        return Err(Error::InvalidInput(format!("need 0 < s_tilde < s, got ({s}, {s_tilde})")));
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let (lo, hi) = (0.5 * (s - s_tilde), 0.5 * (s + s_tilde));
    let shell = PI * (hi * hi - lo * lo);
    let pre = 4.0 / (PI * s_tilde * s_tilde);
    let mut rng = seed.rng();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let rho = (lo * lo + rng.gen::<f64>() * (hi * hi - lo * lo)).sqrt();
        let v = pre * two_ab(s, s_tilde, rho);
        sum += v;
        sum2 += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let quadrature = pre
        * 2.0
        * PI
        * integrate_adaptive(|r| r * two_ab(s, s_tilde, r), lo, hi, &QuadratureSpec::default())?;
    Ok(DeltaMass {
        estimate: shell * mean,
        stderr: shell * (var / n).sqrt(),
        bound: PI * PI * s_tilde.powi(3) * s / 8.0,
        quadrature,
    })
}

/// `(β/64) m(s) ∫_{t0}^s s̃² m(s̃) exp((β/2π) ∫_{s̃}^s m(τ)/τ dτ) ds̃`.
pub fn a2_bound(beta: f64, s: f64, t0: f64) -> Result<f64> {
    if !(t0 > 0.0 && t0 <= s && s <= 1.0) || !(beta >= 0.0) {
        return Err(Error::InvalidInput(format!("need 0 < t0 <= s <= 1, got t0 = {t0}, s = {s}")));
    }
    if t0 == s {
        return Ok(0.0);
    }
    let rate = |tau: f64| beta / (2.0 * PI) * mixture_m_fast(tau) / tau;
    let integral = exp_weighted_integral(|x| x * x * mixture_m_fast(x), rate, t0, s, 40)?;
    Ok(beta / 64.0 * mixture_m_fast(s) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedExponents {
    /// `2 - 3β/(8π)`, away from the small-separation region.
    pub outside_lens: f64,
    /// `3 - β/(2π)`, inside it.
    pub inside_lens: f64,
    pub outside_integrable: bool,
    pub inside_integrable: bool,
}

/// Exponents of `s̃` in the two parts of the refined `Ã₂` estimate;
/// integrable at `s̃ = 0` when above `-1`.
pub fn refined_collapse_exponents(beta: f64) -> RefinedExponents {
    let outside_lens = 2.0 - 3.0 * beta / (8.0 * PI);
    let inside_lens = 3.0 - beta / (2.0 * PI);
    RefinedExponents {
        outside_lens,
        inside_lens,
        outside_integrable: outside_lens > -1.0,
        inside_integrable: inside_lens > -1.0,
    }
}

/// Separation threshold `r/τ*` of the small-separation region.
pub const LAMBDA_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaComplementSup {
    /// Largest mean value `m(τ*) h(r/τ*)` seen with `r/τ* > 0.2`.
    pub sup: f64,
    pub r: f64,
    pub s_tilde: f64,
    pub tau_star: f64,
    /// `h(0.2) max m`, which bounds the mean value on the whole complement.
    pub a_priori_bound: f64,
}

/// Scans `(r, s̃)` with outer scale 1. For each pair the mean
/// `M = ∫_{s̃}^1 m(τ) h(r/τ) dτ/τ / ln(1/s̃)` is computed and `τ*` is the
/// smallest `τ` with `m(τ) h(r/τ) = M`.
pub fn lambda_complement_sup(r_points: usize, s_points: usize, s_min: f64) -> Result<LambdaComplementSup> {
    if r_points < 2 || s_points < 2 || !(s_min > 0.0 && s_min < 1.0) {
        return Err(Error::InvalidInput("need at least 2 points per axis and 0 < s_min < 1".into()));
    }
    let spec = QuadratureSpec::default();
    let m_max = -crate::numerics::minimize_scalar(|x| -mixture_m_fast(x), 0.1, 3.0, 1e-10).1;
    let mut best = LambdaComplementSup {
        sup: f64::NEG_INFINITY,
        r: 0.0,
        s_tilde: 0.0,
        tau_star: 0.0,
        a_priori_bound: m_max * hat(LAMBDA_THRESHOLD),
    };
    for i in 1..=r_points {
        let r = i as f64 / r_points as f64;
        for j in 0..s_points {
            let st = s_min * (1.0 / s_min).powf(j as f64 / s_points as f64);
            let phi = |tau: f64| mixture_m_fast(tau) * hat(r / tau);
            let lo = st.max(r);
            if lo >= 1.0 {
                continue;
            }
            let mean = integrate_adaptive(|u: f64| phi(u.exp()), lo.ln(), 0.0, &spec)? / -st.ln();
            let Some(tau) = first_crossing(&phi, mean, st, 1.0) else {
                continue;
            };
            if r / tau > LAMBDA_THRESHOLD && mean > best.sup {
                best = LambdaComplementSup {
                    sup: mean,
                    r,
                    s_tilde: st,
                    tau_star: tau,
                    ..best
                };
            }
        }
    }
    Ok(best)
}

/// Smallest `τ` in `[a, b]` with `f(τ) = level`, located on a 256-point scan
/// and refined by bisection.
fn first_crossing<F: Fn(f64) -> f64>(f: &F, level: f64, a: f64, b: f64) -> Option<f64> {
    let n = 256;
    let mut prev = (a, f(a) - level);
    if prev.1 == 0.0 {
        return Some(a);
    }
    for i in 1..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let v = f(x) - level;
        if v == 0.0 || v.signum() != prev.1.signum() {
            let (mut lo, mut hi) = (prev.0, x);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (f(mid) - level).signum() == prev.1.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = (x, v);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleBoundReport {
    pub s: f64,
    pub s_tilde: f64,
    pub t0: f64,
    pub beta: f64,
    pub a2_bound: f64,
    pub delta: DeltaMass,
    pub refined: RefinedExponents,
}

pub fn dipole_report(beta: f64, s: f64, s_tilde: f64, t0: f64, seed: RngStream, samples: usize) -> Result<DipoleBoundReport> {
    Ok(DipoleBoundReport {
        s,
        s_tilde,
        t0,
        beta,
        a2_bound: a2_bound(beta, s, t0)?,
        delta: delta_mass(s, s_tilde, seed, samples)?,
        refined: refined_collapse_exponents(beta),
    })
}
