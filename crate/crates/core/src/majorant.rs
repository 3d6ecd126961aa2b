//! Cauchy majorants of the density series: the profiles `Γ` and `B`, the
//! weighted scale integrals `τ_k`, the coefficient systems for `C_n(t)`, their
//! Lambert-W ceilings, and the entropy-energy balance of collapsing clusters.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::cumulative::gauss_legendre;
use crate::numerics::{exp_weighted_integral, integrate_adaptive, ode_solve, OdeGridSpec, QuadratureSpec};
use crate::potentials::{mixture_m_fast, windowed_v, KernelKind, ScaleWindow};
use crate::specfun::lambert_w0;

/// Scales beyond this contribute below `e^{-60}` and are dropped from
/// unbounded windows.
pub const SCALE_HORIZON: f64 = 60.0;

/// Cells per decade for `τ_k` quadrature.
const TAU_CELLS: usize = 40;

/// `β_k = 8π(1 - 1/k)`; `β_2 = 4π`, `β_4 = 6π`, increasing to `8π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ThresholdLadder;

impl ThresholdLadder {
    pub fn beta(k: u32) -> f64 {
        8.0 * PI * (1.0 - 1.0 / k as f64)
    }

    /// The threshold `β_{k+1}` governing order-`k` majorants.
    pub fn above(k: u32) -> f64 {
        Self::beta(k + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Plain,
    Lagrange,
    Improved,
}

impl Variant {
    /// Coefficient `λ_n` of the linear term `λ_n B C_n`.
    pub fn linear_coefficient(self, n: usize, k: u32) -> f64 {
        let (n, kf) = (n as f64, k as f64);
        match self {
            Variant::Plain => n,
            Variant::Lagrange if n <= kf => (kf + 1.0) / kf * (n - 1.0),
            Variant::Lagrange => n,
            Variant::Improved => n - 1.0,
        }
    }

    /// `c` with `λ_n <= c (n - 1)` for all `n >= 2`, so that `τ` built with
    /// exponent `c` gives the Lambert-W ceiling.
    pub fn ceiling_exponent(self, k: u32) -> f64 {
        match self {
            Variant::Plain => 2.0,
            Variant::Lagrange | Variant::Improved => (k as f64 + 1.0) / k as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantParams {
    pub beta: f64,
    pub k: u32,
    pub window: ScaleWindow,
    pub variant: Variant,
    /// Truncation order `N`.
    pub n_max: usize,
}

impl MajorantParams {
    pub fn new(beta: f64, k: u32, window: ScaleWindow, variant: Variant) -> Self {
        MajorantParams {
            beta,
            k,
            window,
            variant,
            n_max: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || self.beta.is_infinite() {
            return Err(Error::InvalidInput(format!("beta must be positive, got {}", self.beta)));
        }
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidInput(format!("truncation order must be at least 2, got {}", self.n_max)));
        }
        Ok(())
    }
}

/// Scale profiles `Γ(t)` and `B(t)` driving the coefficient flow.
pub trait Profiles: Sync {
    fn gamma(&self, t: f64) -> f64;
    fn b(&self, t: f64) -> f64;
}

/// Profiles of the hat decomposition at inverse temperature `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YukawaProfiles {
    pub beta: f64,
}

impl Profiles for YukawaProfiles {
    fn gamma(&self, t: f64) -> f64 {
        gamma_b(self.beta, t).0
    }

    fn b(&self, t: f64) -> f64 {
        gamma_b(self.beta, t).1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfiles {
    pub gamma: f64,
    pub b: f64,
}

impl Profiles for ConstantProfiles {
    fn gamma(&self, _t: f64) -> f64 {
        self.gamma
    }

    fn b(&self, _t: f64) -> f64 {
        self.b
    }
}

/// `Γ = (βπ/4) t² g(t)` and `B = (β/2) g(t)` with `g = m(t)/(2πt)`.
pub fn gamma_b(beta: f64, t: f64) -> (f64, f64) {
    let g = mixture_m_fast(t) / (2.0 * PI * t);
    (0.25 * beta * PI * t * t * g, 0.5 * beta * g)
}

/// `τ_k` over `window`; unbounded windows stop at [`SCALE_HORIZON`].
pub fn tau_k(beta: f64, k: u32, window: ScaleWindow) -> Result<f64> {
    tau_k_between(beta, k, window.t0, window.t1)
}

/// `∫_{t0}^{t1} Γ(s) exp(((k+1)/k) ∫_s^{t1} B) ds`, zero when `t0 = t1`.
pub fn tau_k_between(beta: f64, k: u32, t0: f64, t1: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    tau_with(&YukawaProfiles { beta }, (k as f64 + 1.0) / k as f64, t0, t1)
}

/// `∫_{t0}^{t1} Γ(s) exp(c ∫_s^{t1} B) ds` for arbitrary profiles, `t0 > 0`.
pub fn tau_with<P: Profiles>(profiles: &P, c: f64, t0: f64, t1: f64) -> Result<f64> {
    let t1 = t1.min(SCALE_HORIZON);
    if t0 >= t1 {
        return Ok(0.0);
    }
    exp_weighted_integral(|s| profiles.gamma(s), |s| c * profiles.b(s), t0, t1, TAU_CELLS)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauLimitBound {
    /// `(β/16) e^{2x/5} (1/(1-x) + (1/5)/(2-x))`, `x = β/β_{k+1}`, as stated
    /// for the `t0 → 0` limit of `τ_k(t0, 1)`.
    pub leading_term: f64,
    /// The same estimate with the second power integrated exactly,
    /// `(1/5)/(3/2 - x)`; reduces to the `k = 1` form.
    pub leading_term_exact: f64,
    /// `exp(((k+1)/k)(β/2) ∫_1^∞ g)`, carrying `τ_k(t0, 1)` to `τ_k(t0, ∞)`.
    pub carry_factor: f64,
    /// `τ_k(1, ∞)`.
    pub tail: f64,
    /// `leading_term_exact * carry_factor + tail`, an upper bound on `τ_k(t0, ∞)`.
    pub value: f64,
}

pub fn tau_k_limit_bound(beta: f64, k: u32) -> Result<TauLimitBound> {
    if k == 0 || !(beta > 0.0) {
        return Err(Error::InvalidInput("need beta > 0 and k >= 1".into()));
    }
    let threshold = ThresholdLadder::above(k);
    if beta >= threshold {
        return Err(Error::ThresholdExceeded { beta, threshold });
    }
    let x = beta / threshold;
    let pre = beta / 16.0 * (0.4 * x).exp();
    let leading_term = pre * (1.0 / (1.0 - x) + 0.2 / (2.0 - x));
    let leading_term_exact = pre * (1.0 / (1.0 - x) + 0.2 / (1.5 - x));
    let c = (k as f64 + 1.0) / k as f64;
    let g_tail = windowed_v(KernelKind::EuclidHat, ScaleWindow::to_infinity(1.0)?, 0.0)?;
    let carry_factor = (c * 0.5 * beta * g_tail).exp();
    let tail = tau_k_between(beta, k, 1.0, f64::INFINITY)?;
    Ok(TauLimitBound {
        leading_term,
        leading_term_exact,
        carry_factor,
        tail,
        value: leading_term_exact * carry_factor + tail,
    })
}

/// `-W(-τz)/(τz)`, the generating function of `n^{n-1} τ^{n-1}/n!`.
pub fn theta_bound(z: f64, tau: f64) -> Result<f64> {
    if !(z >= 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidInput(format!("need z, tau >= 0, got ({z}, {tau})")));
    }
    let x = tau * z;
    if E * x > 1.0 + 1e-12 {
        return Err(Error::ConvergenceDomain { value: E * x });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(-lambert_w0(-x.min(1.0 / E))? / x)
}

/// `n^{n-1} x^{n-1} / n!`.
pub fn lambert_coefficient(n: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for j in 2..=n {
        v *= n as f64 * x / j as f64;
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTrajectory {
    pub variant: Option<Variant>,
    pub t: Vec<f64>,
    /// `c[n - 1][i] = C_n(t[i])`, with `C_1 ≡ 1`.
    pub c: Vec<Vec<f64>>,
}

impl CoefficientTrajectory {
    pub fn n_max(&self) -> usize {
        self.c.len()
    }

    pub fn coefficient(&self, n: usize) -> &[f64] {
        &self.c[n - 1]
    }

    /// `C_n` at the final scale.
    pub fn last(&self, n: usize) -> f64 {
        *self.c[n - 1].last().expect("trajectory is nonempty")
    }

    /// Truncated series `Σ_n C_n(t_i) z^{n-1}`.
    pub fn theta(&self, i: usize, z: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, row| acc * z + row[i])
    }
}

/// Integrates `Ċ_n = λ_n B C_n + (nΓ/2) Σ_{j=1}^{n-1} C_j C_{n-j}` for
/// `2 <= n <= n_max` from `C_n(t0) = 0`.
pub fn solve_coefficients<P, L>(
    profiles: &P,
    lambda: L,
    n_max: usize,
    t0: f64,
    t1: f64,
    grid: &OdeGridSpec,
) -> Result<CoefficientTrajectory>
where
    P: Profiles,
    L: Fn(usize) -> f64,
{
    if n_max < 2 {
        return Err(Error::InvalidInput("truncation order must be at least 2".into()));
    }
    let lambdas: Vec<f64> = (0..=n_max).map(|n| if n < 2 { 0.0 } else { lambda(n) }).collect();
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (gamma, b) = (profiles.gamma(t), profiles.b(t));
        let c = |n: usize| if n == 1 { 1.0 } else { y[n - 2] };
        for n in 2..=n_max {
            let conv: f64 = (1..n).map(|j| c(j) * c(n - j)).sum();
            dy[n - 2] = lambdas[n] * b * c(n) + 0.5 * n as f64 * gamma * conv;
        }
    };
    let traj = ode_solve(rhs, &vec![0.0; n_max - 1], t0, t1.min(SCALE_HORIZON), grid)?;
    let mut c = vec![vec![1.0; traj.t.len()]];
    for n in 2..=n_max {
        c.push(traj.y.iter().map(|y| y[n - 2]).collect());
    }
    Ok(CoefficientTrajectory { variant: None, t: traj.t, c })
}

/// Coefficient flow of the selected variant with the hat profiles.
pub fn cn_system(params: &MajorantParams, grid: &OdeGridSpec) -> Result<CoefficientTrajectory> {
    params.validate()?;
    let MajorantParams {
        beta,
        k,
        window,
        variant,
        n_max,
    } = *params;
    let mut traj = solve_coefficients(
        &YukawaProfiles { beta },
        |n| variant.linear_coefficient(n, k),
        n_max,
        window.t0,
        window.t1,
        grid,
    )?;
    traj.variant = Some(variant);
    Ok(traj)
}

/// Lagrange system in the rescaled unknowns `C_n^{(k)} = C_n / f_k^{n-1}`,
/// `f_k = exp(((k+1)/k) ∫_{t0}^t B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrajectory {
    pub t: Vec<f64>,
    /// `c[n - 1][i] = C_n^{(k)}(t[i])`.
    pub c: Vec<Vec<f64>>,
    pub ln_f: Vec<f64>,
}

impl ScaledTrajectory {
    /// `C_n = C_n^{(k)} f_k^{n-1}` at every grid point.
    pub fn unscaled(&self) -> CoefficientTrajectory {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(m, row)| row.iter().zip(&self.ln_f).map(|(v, lf)| v * (m as f64 * lf).exp()).collect())
            .collect();
        CoefficientTrajectory {
            variant: Some(Variant::Lagrange),
            t: self.t.clone(),
            c,
        }
    }
}

/// Integrates the rescaled Lagrange system with `ln f_k` carried as an extra
/// state component.
pub fn scaled_lagrange_system(params: &MajorantParams, grid: &OdeGridSpec) -> Result<ScaledTrajectory> {
    params.validate()?;
    let MajorantParams {
        beta, k, window, n_max, ..
    } = *params;
    let profiles = YukawaProfiles { beta };
    let kf = k as f64;
    let c = (kf + 1.0) / kf;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (gamma, b) = (profiles.gamma(t), profiles.b(t));
        let ln_f = y[n_max - 1];
        let gamma_k = gamma * (-ln_f).exp();
        let cc = |n: usize| if n == 1 { 1.0 } else { y[n - 2] };
        for n in 2..=n_max {
            let conv: f64 = (1..n).map(|j| cc(j) * cc(n - j)).sum();
            let linear = if n as u32 <= k { 0.0 } else { -((n as f64 - kf - 1.0) / kf) * b * cc(n) };
            dy[n - 2] = linear + 0.5 * n as f64 * gamma_k * conv;
        }
        dy[n_max - 1] = c * b;
    };
    let traj = ode_solve(rhs, &vec![0.0; n_max], window.t0, window.t1.min(SCALE_HORIZON), grid)?;
    let mut rows = vec![vec![1.0; traj.t.len()]];
    for n in 2..=n_max {
        rows.push(traj.y.iter().map(|y| y[n - 2]).collect());
    }
    Ok(ScaledTrajectory {
        ln_f: traj.y.iter().map(|y| y[n_max - 1]).collect(),
        t: traj.t,
        c: rows,
    })
}

/// Largest relative mismatch, over interior grid points with a uniform
/// five-point stencil in `ln t`, between the finite-difference `∂_t Θ` of the
/// truncated series and the right-hand side of its PDE,
/// `(Γ/2)(z²Θ²)_z + B·D[Θ]` with `D` the variant's linear operator.
pub fn series_pde_residual<P: Profiles>(traj: &CoefficientTrajectory, profiles: &P, k: u32, z: f64) -> Result<f64> {
    let variant = traj
        .variant
        .ok_or_else(|| Error::InvalidInput("trajectory does not record its variant".into()))?;
    let n_max = traj.n_max();
    let t = &traj.t;
    let mut worst = 0.0f64;
    for i in 2..t.len().saturating_sub(2) {
        let u: Vec<f64> = (i - 2..=i + 2).map(|j| t[j].ln()).collect();
        let h = u[2] - u[1];
        if (0..4).any(|j| ((u[j + 1] - u[j]) - h).abs() > 1e-9 * h) {
            continue;
        }
        let th = |j: usize| traj.theta(j, z);
        let d_du = (-th(i + 2) + 8.0 * th(i + 1) - 8.0 * th(i - 1) + th(i - 2)) / (12.0 * h);
        let lhs = d_du / t[i];

        let a: Vec<f64> = (0..n_max).map(|m| traj.c[m][i]).collect();
        // (z²Θ²)_z truncated at z^{N-1}: coefficient of z^{n-1} is n Σ a_j a_{n-2-j}.
        let mut quad = 0.0;
        let mut linear = 0.0;
        for n in 2..=n_max {
            let conv: f64 = (0..=n - 2).map(|j| a[j] * a[n - 2 - j]).sum();
            let zn = z.powi(n as i32 - 1);
            quad += n as f64 * conv * zn;
            linear += variant.linear_coefficient(n, k) * a[n - 1] * zn;
        }
        let rhs = 0.5 * profiles.gamma(t[i]) * quad + profiles.b(t[i]) * linear;
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(worst)
}

/// Largest relative mismatch between the Improved trajectory at its final
/// scale and the integral form
/// `C_n(t) = (n/2) ∫_{t0}^t e^{(n-1)γ(s,t)} Γ(s) Σ_j C_j C_{n-j}(s) ds`,
/// `γ(s,t) = ∫_s^t B`, evaluated by composite Simpson on the trajectory grid.
pub fn improved_integral_residual<P: Profiles>(traj: &CoefficientTrajectory, profiles: &P) -> Result<f64> {
    if traj.variant != Some(Variant::Improved) {
        return Err(Error::InvalidInput("integral form applies to the Improved variant".into()));
    }
    let t = &traj.t;
    let len = t.len();
    let u: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let h = u[1] - u[0];
    if u.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidInput("integral residual needs a uniform logarithmic grid".into()));
    }
    // γ(t_i, t_end) from per-interval Gauss-Legendre sums.
    let b_u = |x: f64| {
        let s = x.exp();
        profiles.b(s) * s
    };
    let mut gamma_to_end = vec![0.0; len];
    for i in (0..len - 1).rev() {
        gamma_to_end[i] = gamma_to_end[i + 1] + gauss_legendre(&b_u, u[i], u[i + 1]);
    }
    let mut worst = 0.0f64;
    for n in 2..=traj.n_max() {
        let f: Vec<f64> = (0..len)
            .map(|i| {
                let conv: f64 = (1..n).map(|j| traj.c[j - 1][i] * traj.c[n - j - 1][i]).sum();
                0.5 * n as f64 * ((n - 1) as f64 * gamma_to_end[i]).exp() * profiles.gamma(t[i]) * conv * t[i]
            })
            .collect();
        let integral = composite_simpson(&f, h);
        let target = traj.last(n);
        worst = worst.max((integral - target).abs() / target.abs().max(1e-300));
    }
    Ok(worst)
}

/// Simpson's rule on equally spaced samples, closing an odd interval count
/// with the three-eighths rule.
fn composite_simpson(f: &[f64], h: f64) -> f64 {
    let intervals = f.len() - 1;
    let (simpson_end, tail) = if intervals % 2 == 0 { (intervals, 0) } else { (intervals - 3, 3) };
    let mut s = 0.0;
    for i in (0..simpson_end).step_by(2) {
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    if tail == 3 {
        let i = simpson_end;
        s += 3.0 * h / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
    }
    s
}

/// `1/(e τ_k)`, a lower bound on the radius of convergence.
pub fn radius_estimate(beta: f64, k: u32, window: ScaleWindow) -> Result<f64> {
    let threshold = ThresholdLadder::above(k);
    if beta >= threshold {
        return Err(Error::ThresholdExceeded { beta, threshold });
    }
    Ok(1.0 / (E * tau_k(beta, k, window)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    /// Slope of `ln C(δ)` against `ln δ` for the reduced product form.
    pub slope: f64,
    /// Same slope from the exact pair integral (`r = 1` only).
    pub exact_slope: Option<f64>,
    /// `2(2r-1) - βr/(2π)`.
    pub predicted: f64,
    pub deltas: Vec<f64>,
    pub log_c: Vec<f64>,
}

/// Fits the small-`δ` exponent of the weight of a neutral `2r`-cluster
/// confined to a disc of radius `δ`.
pub fn collapse_scan(beta: f64, r: u32, deltas: &[f64]) -> Result<CollapseFit> {
    if deltas.len() < 3 {
        return Err(Error::FitDegenerate {
            required: 3,
            got: deltas.len(),
        });
    }
    if r == 0 || !(beta > 0.0) {
        return Err(Error::InvalidInput("need r >= 1 and beta > 0".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("deltas must decrease inside (0, 1)".into()));
    }
    let rf = r as f64;
    let x: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let mut log_c = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let g_int = windowed_v(KernelKind::EuclidHat, ScaleWindow::new(d, 1.0)?, 0.0)?;
        log_c.push(2.0 * (2.0 * rf - 1.0) * d.ln() + beta * rf * g_int);
    }
    let exact_slope = if r == 1 {
        let mut ys = Vec::with_capacity(deltas.len());
        for &d in deltas {
            ys.push(pair_weight(beta, d)?.ln());
        }
        Some(fit_slope(&x, &ys))
    } else {
        None
    };
    Ok(CollapseFit {
        slope: fit_slope(&x, &log_c),
        exact_slope,
        predicted: 2.0 * (2.0 * rf - 1.0) - beta * rf / (2.0 * PI),
        deltas: deltas.to_vec(),
        log_c,
    })
}

/// `2π ∫_0^δ ρ exp(β v_δ(ρ)) dρ` with `v_δ` the hat potential on scales `[δ, 1]`.
fn pair_weight(beta: f64, delta: f64) -> Result<f64> {
    let window = ScaleWindow::new(delta, 1.0)?;
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-10,
        max_subdivisions: 1000,
        tail_cut: 1e-16,
    };
    let failure = std::cell::RefCell::new(None);
    let f = |w: f64| {
        let rho = w * delta;
        match windowed_v(KernelKind::EuclidHat, window, rho) {
            Ok(v) => w * (beta * v).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let value = 2.0 * PI * delta * delta * integrate_adaptive(f, 0.0, 1.0, &spec)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
