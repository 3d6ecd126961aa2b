//! Shared inputs for the criterion benches.

use yukawa_core::{ChargedConfiguration, FlowContext, KernelKind, ScaleWindow};

/// Arguments spanning the small, moderate and large regimes of `K` and `m`.
pub const ARGUMENTS: [f64; 4] = [1e-3, 0.3, 3.0, 40.0];

/// Flow over `[0.01, 2]` at `β = 1` for `n` particles on a ring of radius
/// 0.2 with alternating charges.
pub fn ring_flow(n: usize, kind: KernelKind) -> FlowContext {
    let positions: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [0.2 * a.cos(), 0.2 * a.sin()]
        })
        .collect();
    let charges: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    FlowContext {
        beta: 1.0,
        window: ScaleWindow::new(0.01, 2.0).expect("valid window"),
        kind,
        config: ChargedConfiguration::from_parts(&positions, &charges).expect("valid configuration"),
    }
}
