use crate::error::{Error, Result};

const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Ten-point Gauss-Legendre rule on `[a, b]`.
pub(crate) fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

fn nodes_on(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .flat_map(move |(x, w)| [(c - h * x, w * h), (c + h * x, w * h)])
}

/// `∫_lo^hi weight(s) exp(∫_s^hi rate(s') ds') ds` for smooth `weight` and
/// `rate` on `0 < lo < hi`.
///
/// Cells are uniform in `ln s`; the inner exponent is accumulated cell by
/// cell and completed inside each cell by its own Gauss-Legendre rule, so the
/// cost is linear in the number of cells.
pub fn exp_weighted_integral<W, R>(weight: W, rate: R, lo: f64, hi: f64, cells_per_decade: usize) -> Result<f64>
where
    W: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    if lo == hi {
        return Ok(0.0);
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) || cells_per_decade == 0 {
        return Err(Error::InvalidInput(format!(
            "weighted integral needs 0 < lo < hi < inf, got [{lo}, {hi}]"
        )));
    }
    let (u0, u1) = (lo.ln(), hi.ln());
    let cells = ((u1 - u0) / std::f64::consts::LN_10 * cells_per_decade as f64).ceil().max(1.0) as usize;
    let h = (u1 - u0) / cells as f64;
    // rate in the log variable
    let rate_u = |u: f64| {
        let s = u.exp();
        rate(s) * s
    };
    let mut terms = Vec::with_capacity(cells * 10);
    let mut acc = 0.0;
    for i in 0..cells {
        let a = u0 + h * i as f64;
        let b = if i + 1 == cells { u1 } else { a + h };
        for (u, w) in nodes_on(a, b) {
            let s = u.exp();
            let partial = acc + gauss_legendre(&rate_u, a, u);
            terms.push((w * weight(s) * s, partial));
        }
        acc += gauss_legendre(&rate_u, a, b);
    }
    let total = acc;
    Ok(terms.iter().map(|(c, p)| c * (total - p).exp()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_is_plain_integral() {
        let v = exp_weighted_integral(|s| s, |_| 0.0, 0.5, 2.0, 16).unwrap();
        assert!((v - (2.0 - 0.125)).abs() < 1e-13);
    }

    #[test]
    fn power_law_oracle() {
        // weight s, rate c/s: ∫ s (hi/s)^c ds = hi^c (hi^{2-c} - lo^{2-c})/(2-c)
        let (c, lo, hi) = (1.3, 1e-3, 1.0);
        let v = exp_weighted_integral(|s| s, |s| c / s, lo, hi, 32).unwrap();
        let exact = hi.powf(c) * (hi.powf(2.0 - c) - lo.powf(2.0 - c)) / (2.0 - c);
        assert!(((v - exact) / exact).abs() < 1e-12, "{v} {exact}");
    }

    #[test]
    fn empty_window() {
        assert_eq!(exp_weighted_integral(|s| s, |s| s, 0.3, 0.3, 8).unwrap(), 0.0);
        assert!(exp_weighted_integral(|s| s, |s| s, 0.0, 0.3, 8).is_err());
    }
}
