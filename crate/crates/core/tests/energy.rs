use proptest::prelude::*;

use yukawa_core::energy::{energy_report, total_energy};
use yukawa_core::{ChargedConfiguration, KernelKind};

fn configuration(max: usize) -> impl Strategy<Value = ChargedConfiguration> {
    prop::collection::vec(((-1.5..1.5f64, -1.5..1.5f64), any::<bool>()), 2..=max).prop_map(|ps| {
        let positions: Vec<[f64; 2]> = ps.iter().map(|((x, y), _)| [*x, *y]).collect();
        let charges: Vec<i8> = ps.iter().map(|(_, c)| if *c { 1 } else { -1 }).collect();
        ChargedConfiguration::from_parts(&positions, &charges).unwrap()
    })
}

fn kind() -> impl Strategy<Value = KernelKind> {
    prop_oneof![Just(KernelKind::EuclidHat), Just(KernelKind::StandardBessel)]
}

fn reorder(c: &ChargedConfiguration, perm: &[usize]) -> ChargedConfiguration {
    let ps = c.particles();
    let positions: Vec<[f64; 2]> = perm.iter().map(|&i| ps[i].position).collect();
    let charges: Vec<i8> = perm.iter().map(|&i| ps[i].charge).collect();
    ChargedConfiguration::from_parts(&positions, &charges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn permutation_invariance(c in configuration(8), k in kind(), seed in any::<u64>()) {
        let n = c.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = total_energy(&c, k, 1.0).unwrap();
        let b = total_energy(&reorder(&c, &perm), k, 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn rigid_motion_invariance(c in configuration(8), k in kind(), angle in 0.0..6.3f64, dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        let (sn, cs) = angle.sin_cos();
        let moved = c.map_positions(|[x, y]| [cs * x - sn * y + dx, sn * x + cs * y + dy]);
        let a = total_energy(&c, k, 1.0).unwrap();
        let b = total_energy(&moved, k, 1.0).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0) * 10.0);
    }

    #[test]
    fn scale_homogeneity(c in configuration(6), k in kind(), s in 0.2..5.0f64) {
        let a = total_energy(&c, k, s).unwrap();
        let b = total_energy(&c.scaled(1.0 / s), k, 1.0).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0) * 10.0);
    }

    #[test]
    fn charge_flip_symmetry(c in configuration(8), k in kind()) {
        let positions: Vec<[f64; 2]> = c.particles().iter().map(|p| p.position).collect();
        let flipped: Vec<i8> = c.particles().iter().map(|p| -p.charge).collect();
        let f = ChargedConfiguration::from_parts(&positions, &flipped).unwrap();
        prop_assert_eq!(total_energy(&c, k, 1.0).unwrap(), total_energy(&f, k, 1.0).unwrap());
    }

    #[test]
    fn hat_bound_holds(c in configuration(8), s in 0.1..3.0f64) {
        let r = energy_report(&c, KernelKind::EuclidHat, s).unwrap();
        prop_assert!(r.margin >= -1e-9, "{r:?}");
    }
}

#[test]
fn collapsed_neutral_saturates() {
    for half in 1..=5 {
        let c = ChargedConfiguration::collapsed(half, half).unwrap();
        let e = total_energy(&c, KernelKind::EuclidHat, 1.0).unwrap();
        assert_eq!(e, -(half as f64));
    }
}
