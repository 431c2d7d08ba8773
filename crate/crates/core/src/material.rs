//! Drude dielectric function and the near-field TM reflection coefficient.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::MaterialParams;

/// A reflection coefficient sampled at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionSample {
    pub omega: f64,
    pub value: Complex64,
}

/// ε(ω) = 1 − ω_p²/(ω² + iΓω).
pub fn epsilon(m: &MaterialParams, omega: f64) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(Error::Domain {
            what: "Drude permittivity",
            at: omega,
        });
    }
    let den = Complex64::new(omega * omega, m.gamma_m * omega);
    Ok(1.0 - m.omega_p * m.omega_p / den)
}

/// r(ω) = ω_sp²/(ω_sp² − ω² − iΓω), the quasi-static limit of (ε−1)/(ε+1).
pub fn r_tm(m: &MaterialParams, omega: f64) -> Result<Complex64> {
    let wsp2 = 0.5 * m.omega_p * m.omega_p;
    let re = wsp2 - omega * omega;
    if m.gamma_m == 0.0 && re.abs() <= 4.0 * f64::EPSILON * wsp2 {
        return Err(Error::Domain {
            what: "reflection coefficient (undamped plasmon pole)",
            at: omega,
        });
    }
    Ok(wsp2 / Complex64::new(re, -m.gamma_m * omega))
}

/// Hot-path version of [`r_tm`]; the caller guarantees Γ > 0.
#[inline]
pub(crate) fn reflection(m: &MaterialParams, omega: f64) -> Complex64 {
    let wsp2 = 0.5 * m.omega_p * m.omega_p;
    wsp2 / Complex64::new(wsp2 - omega * omega, -m.gamma_m * omega)
}

pub fn reflection_sample(m: &MaterialParams, omega: f64) -> Result<ReflectionSample> {
    Ok(ReflectionSample {
        omega,
        value: r_tm(m, omega)?,
    })
}

/// Low-frequency slope of Im r, 2ε₀ρ = 2Γ/ω_p².
pub fn resistivity_slope(m: &MaterialParams) -> f64 {
    2.0 * m.gamma_m / (m.omega_p * m.omega_p)
}
