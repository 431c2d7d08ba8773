//! Nonequilibrium steady state of a polarizable atom moving at constant
//! velocity above a planar Drude metal.
//!
//! The library computes the velocity-dependent noise and dissipation kernels
//! of the near-field Green tensor, the dressed polarizability, the stationary
//! dipole spectra and the thermodynamic observables built from them (power
//! balance, LTE imbalance, spectral energy, friction). A time-domain Langevin
//! simulator is provided as an independent cross-check.
//!
//! All quantities are dimensionless: ħ = ε₀ = 1, lengths in units of the
//! atom–surface distance and frequencies in units of the surface-plasmon
//! frequency. See [`units`] for the conversion to SI.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
pub mod dyad;
pub mod error;
pub mod greens;
pub mod kernels;
pub mod material;
pub mod observables;
pub mod polarizability;
pub mod quadrature;
pub mod table;
pub mod timedomain;
pub mod units;

pub use dyad::HermitianDyad;
pub use error::{Error, Result};
pub use units::{MaterialParams, NumericsConfig, Scales, Scenario, SiParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
