//! Thermodynamic observables of the steady state.

pub mod plan;

pub use plan::{doppler_edge, omega_max, Plan};
pub mod power;

pub use power::{lte_asymptote, lte_power, power_balance, power_balance_with, PowerOptions, PowerReport};
pub mod energy;
pub mod fdi;
pub mod friction;

pub use energy::{
    bm_parameters, bm_spectral_energy, energy_report, spectral_energy, spectral_energy_lte, total_energy,
    EnergyReport, EnergySample,
};
pub use friction::{friction, friction_with_table, spectrum_table, FrictionReport};
pub use fdi::{fdi_asymptote, fdi_ratio, FdiSample};

/// sgn(x), zero at zero.
pub(crate) fn sign(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}
