//! Violation of the fluctuation–dissipation relation, Tr ν/|Tr D|.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::kernels;
use crate::units::Scenario;

/// Below this fraction of Tr ν the dissipation trace is treated as zero.
const TRACE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdiSample {
    pub omega: f64,
    pub v: f64,
    pub ratio: f64,
    pub asymptote: f64,
    pub err: f64,
}

/// Two-sided asymptote: 1 for ω ≫ v/z_a, 3v/(π z_a ω) for ω ≪ v/z_a.
pub fn fdi_asymptote(omega: f64, v: f64, za: f64) -> f64 {
    (3.0 * v.abs() / (PI * za * omega)).max(1.0)
}

pub fn fdi_ratio(omega: f64, v: f64, s: &Scenario) -> Result<FdiSample> {
    if !(omega > 0.0) {
        return Err(Error::Domain {
            what: "fdi ratio needs positive frequency",
            at: omega,
        });
    }
    let b = kernels(omega, v, s)?;
    let nu = b.noise.trace();
    let d = b.dissipation.trace().abs();
    if !(d > TRACE_FLOOR * nu) {
        return Err(Error::Domain {
            what: "fdi ratio: dissipation trace below floor",
            at: omega,
        });
    }
    let ratio = nu / d;
    Ok(FdiSample {
        omega,
        v,
        ratio,
        asymptote: fdi_asymptote(omega, v, s.za),
        err: ratio * (b.err_noise / nu + b.err_dissipation / d),
    })
}
