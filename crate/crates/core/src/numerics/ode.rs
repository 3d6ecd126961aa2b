use crate::error::{Error, Result};

/// Discretization contract for scale flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeGridSpec {
    /// Steps per factor of ten in `t`; spans starting at `t <= 0` use
    /// `10 * steps_per_decade` uniform steps instead.
    pub steps_per_decade: usize,
    /// Re-run with doubled resolution and require relative agreement `1e-8`.
    pub richardson_check: bool,
}

impl Default for OdeGridSpec {
    fn default() -> Self {
        OdeGridSpec {
            steps_per_decade: 200,
            richardson_check: false,
        }
    }
}

impl OdeGridSpec {
    pub fn new(steps_per_decade: usize, richardson_check: bool) -> Result<Self> {
        let g = OdeGridSpec {
            steps_per_decade,
            richardson_check,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_decade < 2 {
            return Err(Error::InvalidInput(format!(
                "steps_per_decade must be at least 2, got {}",
                self.steps_per_decade
            )));
        }
        Ok(())
    }

    fn refined(&self) -> Self {
        OdeGridSpec {
            steps_per_decade: 2 * self.steps_per_decade,
            richardson_check: false,
        }
    }
}

pub const RICHARDSON_TOL: f64 = 1e-8;

/// Sampled solution; `y[i]` is the state at `t[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.y.last().expect("trajectory holds at least the initial state")
    }
}

#[derive(Debug, Clone, Copy)]
enum Span {
    /// Geometric steps.
    Log { from: f64, to: f64, steps: usize },
    /// Arithmetic steps.
    Linear { from: f64, to: f64, steps: usize },
    /// `t = from + u^2` with arithmetic steps in `u`; smooths `(t - from)^{3/2}` kinks.
    Root { from: f64, to: f64, steps: usize },
}

fn plan(t0: f64, t1: f64, breaks: &[f64], spd: usize) -> Vec<Span> {
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > t0 && b < t1).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut edges = vec![t0];
    edges.extend(inner);
    edges.push(t1);
    let decades = |a: f64, b: f64| ((spd as f64) * (b / a).log10()).ceil().max(2.0) as usize;
    let mut spans = Vec::new();
    for (i, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a <= 0.0 {
            spans.push(Span::Linear {
                from: a,
                to: b,
                steps: 10 * spd,
            });
            continue;
        }
        if i == 0 {
            spans.push(Span::Log {
                from: a,
                to: b,
                steps: decades(a, b),
            });
            continue;
        }
        let root_end = (1.5 * a).min(b);
        spans.push(Span::Root {
            from: a,
            to: root_end,
            steps: decades(a, root_end).max(8),
        });
        if root_end < b {
            spans.push(Span::Log {
                from: root_end,
                to: b,
                steps: decades(root_end, b),
            });
        }
    }
    spans
}

fn rk4_step<F>(rhs: &F, t: f64, y: &[f64], h: f64, work: &mut [Vec<f64>; 5]) -> Vec<f64>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let [k1, k2, k3, k4, tmp] = work;
    rhs(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    rhs(t + 0.5 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    rhs(t + 0.5 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    rhs(t + h, tmp, k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn integrate<F>(rhs: &F, y0: &[f64], spans: &[Span]) -> Trajectory
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut work: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let first = match spans[0] {
        Span::Log { from, .. } | Span::Linear { from, .. } | Span::Root { from, .. } => from,
    };
    let mut ts = vec![first];
    let mut ys = vec![y0.to_vec()];
    let mut y = y0.to_vec();
    for span in spans {
        match *span {
            Span::Linear { from, to, steps } => {
                let h = (to - from) / steps as f64;
                for k in 0..steps {
                    let t = from + h * k as f64;
                    y = rk4_step(rhs, t, &y, h, &mut work);
                    ts.push(if k + 1 == steps { to } else { t + h });
                    ys.push(y.clone());
                }
            }
            Span::Log { from, to, steps } => {
                // dy/du = t f(t, y) with t = e^u.
                let (u0, u1) = (from.ln(), to.ln());
                let h = (u1 - u0) / steps as f64;
                let g = |u: f64, y: &[f64], out: &mut [f64]| {
                    let t = u.exp();
                    rhs(t, y, out);
                    out.iter_mut().for_each(|v| *v *= t);
                };
                for k in 0..steps {
                    let u = u0 + h * k as f64;
                    y = rk4_step(&g, u, &y, h, &mut work);
                    ts.push(if k + 1 == steps { to } else { (u + h).exp() });
                    ys.push(y.clone());
                }
            }
            Span::Root { from, to, steps } => {
                let h = (to - from).sqrt() / steps as f64;
                let g = |u: f64, y: &[f64], out: &mut [f64]| {
                    rhs(from + u * u, y, out);
                    out.iter_mut().for_each(|v| *v *= 2.0 * u);
                };
                for k in 0..steps {
                    let u = h * k as f64;
                    y = rk4_step(&g, u, &y, h, &mut work);
                    let un = u + h;
                    ts.push(if k + 1 == steps { to } else { from + un * un });
                    ys.push(y.clone());
                }
            }
        }
    }
    Trajectory { t: ts, y: ys }
}

fn relative_deviation(coarse: &[f64], fine: &[f64]) -> f64 {
    let scale = fine.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = coarse
        .iter()
        .zip(fine)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Classical fourth-order Runge-Kutta from `t0` to `t1` on a logarithmic grid.
pub fn ode_solve<F>(rhs: F, y0: &[f64], t0: f64, t1: f64, grid: &OdeGridSpec) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    ode_solve_with_breaks(rhs, y0, t0, t1, &[], grid)
}

/// As [`ode_solve`], restarting the grid at each interior break point. Just
/// past a break the step is taken in `u = sqrt(t - b)`, which restores full
/// order for right-hand sides vanishing like `(t - b)^{3/2}`.
pub fn ode_solve_with_breaks<F>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    breaks: &[f64],
    grid: &OdeGridSpec,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    grid.validate()?;
    if !(t0 < t1) || !t1.is_finite() {
        return Err(Error::InvalidInput(format!(
            "ODE span needs finite t0 < t1, got [{t0}, {t1}]"
        )));
    }
    let coarse = integrate(&rhs, y0, &plan(t0, t1, breaks, grid.steps_per_decade));
    if let Some(bad) = coarse.last().iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("ODE solution blew up ({bad})")));
    }
    if !grid.richardson_check {
        return Ok(coarse);
    }
    let fine_grid = grid.refined();
    let fine = integrate(&rhs, y0, &plan(t0, t1, breaks, fine_grid.steps_per_decade));
    let deviation = relative_deviation(coarse.last(), fine.last());
    if deviation > RICHARDSON_TOL {
        return Err(Error::StepCheckFailed {
            deviation,
            tolerance: RICHARDSON_TOL,
        });
    }
    Ok(fine)
}
