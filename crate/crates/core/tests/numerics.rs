use proptest::prelude::*;

use yukawa_core::energy::energy_scan;
use yukawa_core::numerics::{integrate_adaptive, ode_solve};
use yukawa_core::specfun::lambert_w0;
use yukawa_core::{KernelKind, OdeGridSpec, QuadratureSpec, RngStream};

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(
        f in prop::collection::vec(-3.0..3.0f64, 1..7),
        g in prop::collection::vec(-3.0..3.0f64, 1..7),
        alpha in -2.0..2.0f64,
        beta in -2.0..2.0f64,
        a in -2.0..0.0f64,
        len in 0.1..3.0f64,
    ) {
        let spec = QuadratureSpec::default();
        let b = a + len;
        let int = |h: &dyn Fn(f64) -> f64| integrate_adaptive(h, a, b, &spec).unwrap();
        let lhs = int(&|x| alpha * poly(&f, x) + beta * poly(&g, x));
        let rhs = alpha * int(&|x| poly(&f, x)) + beta * int(&|x| poly(&g, x));
        let scale = int(&|x| (alpha * poly(&f, x)).abs() + (beta * poly(&g, x)).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 10.0 * spec.rel_tol * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn ode_refinement_is_below_check_tolerance(rate in 0.1..1.5f64, t0 in 1e-2..0.5f64) {
        // y' = rate y / t  (power law) and a logistic-type coupling.
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = rate * y[0] / t;
            dy[1] = y[0] * y[0] / (1.0 + t) - y[1] / t;
        };
        let coarse = ode_solve(rhs, &[1.0, 0.0], t0, 5.0, &OdeGridSpec::new(400, false).unwrap()).unwrap();
        let fine = ode_solve(rhs, &[1.0, 0.0], t0, 5.0, &OdeGridSpec::new(800, false).unwrap()).unwrap();
        for (c, f) in coarse.last().iter().zip(fine.last()) {
            prop_assert!((c - f).abs() <= 1e-8 * f.abs().max(1.0));
        }
        let exact = (5.0 / t0).powf(rate);
        prop_assert!((fine.last()[0] / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lambert_inverse(u in 0.0..1.0f64) {
        let lo = -1.0 / std::f64::consts::E + 1e-6;
        let x = lo * (1.0 - u) + 1e3 * u * u * u;
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-10 * x.abs().max(1.0));
    }
}

#[test]
fn checked_grid_passes_on_smooth_systems() {
    let grid = OdeGridSpec::new(200, true).unwrap();
    let traj = ode_solve(|t, y, dy| dy[0] = -y[0] / (1.0 + t), &[1.0], 0.01, 10.0, &grid).unwrap();
    assert!((traj.last()[0] - 1.01 / 11.0).abs() < 1e-10);
}

#[test]
fn seeded_scans_are_bitwise_reproducible() {
    let seed = RngStream::new(99, 3);
    let a = energy_scan(KernelKind::EuclidHat, 6, 500, 1.0, seed).unwrap();
    let b = energy_scan(KernelKind::EuclidHat, 6, 500, 1.0, seed).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a, b);
    let c = energy_scan(KernelKind::EuclidHat, 6, 500, 1.0, RngStream::new(99, 4)).unwrap();
    assert_ne!(a.column("samples"), c.column("samples"));
}
