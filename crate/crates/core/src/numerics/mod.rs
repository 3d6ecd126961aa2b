//! Shared numerical kernels: adaptive quadrature, scalar minimization,
//! fixed-step ODE integration and seeded random streams.

pub mod cumulative;
pub mod minimize;
pub mod ode;
pub mod quadrature;
pub mod rng;

pub use cumulative::exp_weighted_integral;
pub use minimize::{coordinate_descent, minimize_scalar, DescentOutcome};
pub use ode::{ode_solve, ode_solve_with_breaks, OdeGridSpec, Trajectory};
pub use quadrature::{
    integrate_adaptive, integrate_semi_infinite, integrate_with_breaks, trapezoid_half_line,
    QuadratureSpec,
};
pub use rng::RngStream;
