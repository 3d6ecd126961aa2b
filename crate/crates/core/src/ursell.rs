//! Ursell functions of a finite configuration, once from the scale flow over
//! all subsets and once from the connected-graph sum of Mayer factors.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::energy::ChargedConfiguration;
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, ode_solve_with_breaks, OdeGridSpec, QuadratureSpec};
use crate::potentials::{windowed_v, KernelKind, ScaleWindow};

pub const MAX_PARTICLES: usize = 6;

/// `f_I` for every nonempty subset `I`, indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetTable {
    n: usize,
    values: Vec<f64>,
}

impl SubsetTable {
    fn initial(n: usize) -> Self {
        let mut values = vec![0.0; 1 << n];
        for i in 0..n {
            values[1 << i] = 1.0;
        }
        SubsetTable { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Value on the full index set.
    pub fn top(&self) -> f64 {
        self.values[(1 << self.n) - 1]
    }

    /// `(mask, f_I)` over nonempty subsets.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate().skip(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowContext {
    pub beta: f64,
    pub window: ScaleWindow,
    pub kind: KernelKind,
    pub config: ChargedConfiguration,
}

impl FlowContext {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) || self.beta.is_infinite() {
            return Err(Error::InvalidInput(format!("beta must be finite and nonnegative, got {}", self.beta)));
        }
        if self.window.is_unbounded() {
            return Err(Error::InvalidInput("the flow needs a bounded scale window".into()));
        }
        if self.config.len() > MAX_PARTICLES {
            return Err(Error::SizeLimit {
                n: self.config.len(),
                max: MAX_PARTICLES,
            });
        }
        Ok(())
    }
}

/// Two opposite charges at distance `r`: `β∫ g h(r/s) exp(β v(s, t; r)) ds`
/// over `[t0, t]`, with the inner potential from its own quadrature.
pub fn psi2_closed(beta: f64, t0: f64, t: f64, r: f64, kind: KernelKind) -> Result<f64> {
    if !(r >= 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidInput(format!("need beta >= 0 and r >= 0, got ({beta}, {r})")));
    }
    if t == t0 {
        return Ok(0.0);
    }
    ScaleWindow::new(t0, t)?;
    let lower = match kind.support() {
        Some(edge) => t0.max(r / edge),
        None => t0,
    };
    if lower >= t {
        return Ok(0.0);
    }
    let density = kind.density();
    let failure = RefCell::new(None);
    let outer = |u: f64| {
        let s = u.exp();
        let inner = if s < t {
            windowed_v(kind, ScaleWindow { t0: s, t1: t }, r)
        } else {
            Ok(0.0)
        };
        match inner {
            Ok(v) => beta * s * density.at(s) * kind.kernel(r / s) * (beta * v).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let spec = QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_subdivisions: 2000,
        tail_cut: 1e-16,
    };
    let value = integrate_adaptive(outer, lower.ln(), t.ln(), &spec)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Integrates the subset system from `f_I(t0) = [|I| = 1]` to `t1`.
pub fn ursell_flow(ctx: &FlowContext, grid: &OdeGridSpec) -> Result<SubsetTable> {
    ctx.validate()?;
    let n = ctx.config.len();
    let full = (1usize << n) - 1;
    let density = ctx.kind.density();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, ctx.config.sign(i, j), ctx.config.distance(i, j)));
        }
    }
    let rhs = |t: f64, f: &[f64], df: &mut [f64]| {
        let mut w = [[0.0; MAX_PARTICLES]; MAX_PARTICLES];
        let g = density.at(t);
        for &(i, j, sign, r) in &pairs {
            let v = ctx.beta * sign * g * ctx.kind.kernel(r / t);
            w[i][j] = v;
            w[j][i] = v;
        }
        let cross = |a: usize, b: usize| {
            let mut c = 0.0;
            for i in bits(a) {
                for j in bits(b) {
                    c += w[i][j];
                }
            }
            c
        };
        df.iter_mut().for_each(|d| *d = 0.0);
        for mask in 1..=full {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut d = 0.0;
            for (a, i) in bits(mask).enumerate() {
                for j in bits(mask).skip(a + 1) {
                    d -= w[i][j] * f[mask];
                }
            }
            // Each unordered split once: J holds the lowest element of I.
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let j = sub | low;
                if j != mask {
                    let k = mask ^ j;
                    d -= cross(j, k) * f[j] * f[k];
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            df[mask] = d;
        }
    };
    let breaks: Vec<f64> = match ctx.kind.support() {
        Some(edge) => pairs.iter().map(|p| p.3 / edge).collect(),
        None => Vec::new(),
    };
    let init = SubsetTable::initial(n);
    let traj = ode_solve_with_breaks(rhs, &init.values, ctx.window.t0, ctx.window.t1, &breaks, grid)?;
    Ok(SubsetTable {
        n,
        values: traj.last().to_vec(),
    })
}

fn bits(mut mask: usize) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            i
        })
    })
}

/// `Σ_{connected G} Π_{ij ∈ G} f_ij` on `n` labelled vertices, with `weights`
/// listing `f_ij` for `i < j` in lexicographic order.
pub fn connected_graph_sum(n: usize, weights: &[f64]) -> Result<f64> {
    if n > MAX_PARTICLES {
        return Err(Error::SizeLimit { n, max: MAX_PARTICLES });
    }
    let m = n * n.saturating_sub(1) / 2;
    if weights.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} pair weights, got {}", weights.len())));
    }
    if n <= 1 {
        return Ok(1.0);
    }
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut total = 0.0;
    for subset in 1usize..(1 << m) {
        if (subset.count_ones() as usize) < n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        let mut components = n;
        let mut product = 1.0;
        for (e, &(i, j)) in edges.iter().enumerate() {
            if subset >> e & 1 == 1 {
                product *= weights[e];
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
        if components == 1 {
            total += product;
        }
    }
    Ok(total)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected-graph sum of `exp(-β σ_i σ_j v_ij) - 1` with windowed pair potentials.
pub fn ursell_graph_sum(config: &ChargedConfiguration, beta: f64, window: ScaleWindow, kind: KernelKind) -> Result<f64> {
    let n = config.len();
    if n > MAX_PARTICLES {
        return Err(Error::SizeLimit { n, max: MAX_PARTICLES });
    }
    let mut weights = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = windowed_v(kind, window, config.distance(i, j))?;
            weights.push((-beta * config.sign(i, j) * v).exp_m1());
        }
    }
    connected_graph_sum(n, &weights)
}
