//! Scale decompositions of the two-dimensional Yukawa potential, energy
//! bounds for charged configurations, Ursell-function flows and Cauchy
//! majorants of the Mayer series.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod dipole;
pub mod energy;
pub mod error;
pub mod majorant;
pub mod numerics;
pub mod potentials;
pub mod report;
pub mod specfun;
pub mod ursell;

pub use energy::{ChargedConfiguration, EnergyReport, Particle};
pub use error::{Error, Result};
pub use majorant::{CoefficientTrajectory, MajorantParams, ThresholdLadder, Variant};
pub use numerics::{OdeGridSpec, QuadratureSpec, RngStream};
pub use potentials::{KernelKind, MixtureDensity, ScaleWindow};
pub use report::ScanReport;
pub use ursell::{FlowContext, SubsetTable};
