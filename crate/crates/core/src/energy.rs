//! Energies of charged point configurations in the plane, the lower bound
//! `U_n >= -(n - |Q|)/2` for the hat and its saturation, and the minimal
//! specific energies of the standard kernel.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{coordinate_descent, RngStream};
use crate::potentials::{standard_kernel_fast, KernelKind};
use crate::report::ScanReport;

/// Tolerance for the hat lower bound.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: [f64; 2],
    pub charge: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargedConfiguration {
    particles: Vec<Particle>,
}

impl ChargedConfiguration {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidInput("configuration needs at least one particle".into()));
        }
        for p in &particles {
            if p.charge != 1 && p.charge != -1 {
                return Err(Error::InvalidInput(format!("charge {} is not ±1", p.charge)));
            }
            if !p.position.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidInput(format!("position {:?} is not finite", p.position)));
            }
        }
        Ok(ChargedConfiguration { particles })
    }

    pub fn from_parts(positions: &[[f64; 2]], charges: &[i8]) -> Result<Self> {
        if positions.len() != charges.len() {
            return Err(Error::InvalidInput("positions and charges differ in length".into()));
        }
        Self::new(
            positions
                .iter()
                .zip(charges)
                .map(|(&position, &charge)| Particle { position, charge })
                .collect(),
        )
    }

    /// All particles at the origin, `plus` of them positive.
    pub fn collapsed(plus: usize, minus: usize) -> Result<Self> {
        let charges: Vec<i8> = std::iter::repeat(1).take(plus).chain(std::iter::repeat(-1).take(minus)).collect();
        Self::from_parts(&vec![[0.0, 0.0]; plus + minus], &charges)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn net_charge(&self) -> i64 {
        self.particles.iter().map(|p| p.charge as i64).sum()
    }

    /// Positions multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.map_positions(|[x, y]| [x * factor, y * factor])
    }

    pub fn map_positions<F: Fn([f64; 2]) -> [f64; 2]>(&self, f: F) -> Self {
        ChargedConfiguration {
            particles: self
                .particles
                .iter()
                .map(|p| Particle {
                    position: f(p.position),
                    charge: p.charge,
                })
                .collect(),
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let [a, b] = self.particles[i].position;
        let [c, d] = self.particles[j].position;
        (a - c).hypot(b - d)
    }

    pub(crate) fn sign(&self, i: usize, j: usize) -> f64 {
        (self.particles[i].charge * self.particles[j].charge) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub net_charge: i64,
    /// `-(n - |Q|)/2`.
    pub bound: f64,
    pub margin: f64,
}

/// `Σ_{i<j} σ_i σ_j kernel(|x_i - x_j| / scale)`.
pub fn total_energy(config: &ChargedConfiguration, kind: KernelKind, scale: f64) -> Result<f64> {
    if !(scale > 0.0) || scale.is_infinite() {
        return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    let n = config.len();
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            u += config.sign(i, j) * kind.kernel(config.distance(i, j) / scale);
        }
    }
    Ok(u)
}

pub fn energy_report(config: &ChargedConfiguration, kind: KernelKind, scale: f64) -> Result<EnergyReport> {
    let energy = total_energy(config, kind, scale)?;
    let net_charge = config.net_charge();
    let bound = -((config.len() as i64 - net_charge.abs()) as f64) / 2.0;
    Ok(EnergyReport {
        energy,
        net_charge,
        bound,
        margin: energy - bound,
    })
}

/// Random configuration with `n` particles uniform in `[-half_width, half_width]²`.
pub fn random_configuration<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> ChargedConfiguration {
    let particles = (0..n)
        .map(|_| Particle {
            position: [rng.gen_range(-half_width..=half_width), rng.gen_range(-half_width..=half_width)],
            charge: if rng.gen::<bool>() { 1 } else { -1 },
        })
        .collect();
    ChargedConfiguration { particles }
}

/// Margins of `samples` random configurations with `2 <= n <= n_max` plus every
/// collapsed configuration, tabulated per `n`. No bound is enforced.
pub fn energy_scan(kind: KernelKind, n_max: usize, samples: usize, half_width: f64, seed: RngStream) -> Result<ScanReport> {
    if n_max < 2 || samples == 0 {
        return Err(Error::InvalidInput("need n_max >= 2 and samples >= 1".into()));
    }
    if !(half_width > 0.0) || half_width.is_infinite() {
        return Err(Error::InvalidInput(format!("box half-width must be positive, got {half_width}")));
    }
    let draws: Vec<(usize, f64, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.substream(i as u64).rng();
            let n = rng.gen_range(2..=n_max);
            let config = random_configuration(&mut rng, n, half_width);
            let r = energy_report(&config, kind, 1.0).expect("unit scale is valid");
            (n, r.margin, i)
        })
        .collect();

    let mut report = ScanReport::new(
        "energy lower bound scan",
        &["n", "samples", "worst_margin", "collapsed_margin"],
    );
    let mut worst = (f64::INFINITY, 0usize, 0usize);
    let mut max_collapsed = 0.0f64;
    for n in 2..=n_max {
        let mut count = 0usize;
        let mut w = f64::INFINITY;
        for &(m, margin, i) in &draws {
            if m == n {
                count += 1;
                w = w.min(margin);
                if (margin, i) < (worst.0, worst.2) {
                    worst = (margin, n, i);
                }
            }
        }
        let mut collapsed = f64::INFINITY;
        for plus in 0..=n {
            let r = energy_report(&ChargedConfiguration::collapsed(plus, n - plus)?, kind, 1.0)?;
            w = w.min(r.margin);
            if r.margin < worst.0 {
                worst = (r.margin, n, usize::MAX);
            }
            if plus == n.div_ceil(2) {
                collapsed = r.margin;
            }
        }
        max_collapsed = max_collapsed.max(collapsed.abs());
        report.push_row(vec![n as f64, count as f64, w, collapsed])?;
    }
    report.set("worst_margin", worst.0);
    report.set("worst_n", worst.1 as f64);
    report.set("max_abs_collapsed_margin", max_collapsed);
    report.set("samples", samples as f64);
    report.set(
        "violations",
        draws.iter().filter(|d| d.1 < -BOUND_SLACK).count() as f64,
    );
    if kind == KernelKind::StandardBessel && worst.0 < -BOUND_SLACK {
        report.note("standard kernel goes below the hat bound; informational only");
    }
    Ok(report)
}

/// Hat-kernel scan enforcing the lower bound: any margin below `-1e-9` is an
/// error carrying the offending configuration.
pub fn lower_bound_scan(n_max: usize, samples: usize, half_width: f64, seed: RngStream) -> Result<ScanReport> {
    let report = energy_scan(KernelKind::EuclidHat, n_max, samples, half_width, seed)?;
    let worst = report.get("worst_margin").unwrap_or(0.0);
    if worst < -BOUND_SLACK {
        let configuration = (0..samples)
            .find_map(|i| {
                let mut rng = seed.substream(i as u64).rng();
                let n = rng.gen_range(2..=n_max);
                let c = random_configuration(&mut rng, n, half_width);
                let r = energy_report(&c, KernelKind::EuclidHat, 1.0).ok()?;
                (r.margin == worst).then(|| serde_json::to_string(&c).unwrap_or_default())
            })
            .unwrap_or_else(|| "collapsed".into());
        return Err(Error::BoundViolation {
            margin: worst,
            configuration,
        });
    }
    Ok(report)
}

/// Three collinear charges `+ - +` at spacings `r1`, `r2`, halved.
pub fn ebar3_objective(r1: f64, r2: f64) -> f64 {
    0.5 * (standard_kernel_fast(r1 + r2) - standard_kernel_fast(r1) - standard_kernel_fast(r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ebar3 {
    pub r1: f64,
    pub r2: f64,
    pub value: f64,
}

/// Minimal modified specific energy of three particles for `w K1(w)`,
/// reduced to the collinear two-spacing problem on `[0, 6]²`.
pub fn minimize_ebar3_standard() -> Result<Ebar3> {
    let steps = 600;
    let h = 0.01;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=steps {
        for j in i..=steps {
            let (a, b) = (i as f64 * h, j as f64 * h);
            let v = ebar3_objective(a, b);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let out = coordinate_descent(
        |x| ebar3_objective(x[0], x[1]),
        &[best.1, best.2],
        h,
        1e-7,
        Some((0.0, 6.0)),
        10_000,
    )?;
    Ok(Ebar3 {
        r1: out.x[0],
        r2: out.x[1],
        value: out.value,
    })
}

/// `min_{x,y}` over the grid `{0, step, ..., grid_max}` of
/// `f(x+y) - f(x) - f(y)` with `f = w K1(w) - c`.
pub fn superadditivity_margin(c: f64, grid_max: f64, grid_step: f64) -> Result<f64> {
    if !(c > 0.0) || !(grid_step > 0.0) || !(grid_max >= grid_step) {
        return Err(Error::InvalidInput("need c > 0 and 0 < grid_step <= grid_max".into()));
    }
    let n = (grid_max / grid_step).floor() as usize;
    let values: Vec<f64> = (0..=2 * n).map(|i| standard_kernel_fast(i as f64 * grid_step)).collect();
    let mut margin = f64::INFINITY;
    for i in 0..=n {
        for j in i..=n {
            margin = margin.min(values[i + j] - values[i] - values[j] + c);
        }
    }
    Ok(margin)
}

/// Minimal specific energy `e_n` and its non-neutral modification `ē_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecificEnergies {
    pub e: f64,
    pub ebar: f64,
}

pub const MULTI_STARTS: usize = 32;

/// Hat values are exact; standard-kernel values are multi-start upper bounds.
pub fn specific_energies(kind: KernelKind, n: usize) -> Result<SpecificEnergies> {
    specific_energies_with(kind, n, MULTI_STARTS, RngStream::new(0x5eed, 0))
}

pub fn specific_energies_with(kind: KernelKind, n: usize, starts: usize, seed: RngStream) -> Result<SpecificEnergies> {
    if !(2..=7).contains(&n) {
        return Err(Error::InvalidInput(format!("specific energies need 2 <= n <= 7, got {n}")));
    }
    let nf = n as f64;
    if kind == KernelKind::EuclidHat {
        let ebar = if n % 2 == 1 { -0.5 } else { -(nf - 2.0) / (2.0 * (nf - 1.0)) };
        return Ok(SpecificEnergies {
            e: -((n - n % 2) as f64) / (2.0 * nf),
            ebar,
        });
    }
    if starts == 0 {
        return Err(Error::InvalidInput("need at least one start".into()));
    }
    // Charge flips leave U invariant, so plus >= minus suffices.
    let mut e = f64::INFINITY;
    let mut ebar = f64::INFINITY;
    for plus in n.div_ceil(2)..=n {
        let charges: Vec<i8> = (0..n).map(|i| if i < plus { 1 } else { -1 }).collect();
        let u = minimal_energy(kind, &charges, starts, seed.substream(plus as u64))?;
        e = e.min(u / nf);
        if 2 * plus != n {
            ebar = ebar.min(u / (nf - 1.0));
        }
    }
    Ok(SpecificEnergies { e, ebar })
}

/// Smallest energy found over `starts` descents; particle 0 is pinned at the origin.
fn minimal_energy(kind: KernelKind, charges: &[i8], starts: usize, seed: RngStream) -> Result<f64> {
    let n = charges.len();
    let energy = |x: &[f64]| {
        let pos = |i: usize| if i == 0 { [0.0, 0.0] } else { [x[2 * i - 2], x[2 * i - 1]] };
        let mut u = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let ([a, b], [c, d]) = (pos(i), pos(j));
                u += (charges[i] * charges[j]) as f64 * kind.kernel((a - c).hypot(b - d));
            }
        }
        u
    };
    let outcomes: Vec<Result<f64>> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.substream(s as u64).rng();
            let start: Vec<f64> = (0..2 * (n - 1)).map(|_| rng.gen_range(-1.5..1.5)).collect();
            coordinate_descent(energy, &start, 0.25, 1e-6, None, 200_000).map(|o| o.value)
        })
        .collect();
    let mut best = f64::INFINITY;
    for o in outcomes {
        best = best.min(o?);
    }
    Ok(best)
}
