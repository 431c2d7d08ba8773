//! Energy flow between the atom and the field.
//!
//! ```text
//! P_in  = 2∫₀^∞ dω/2π ω Tr[ν α_Im]                      noise work on the dipole
//! P_out = 2∫₀^∞ dω/2π ω ∫dq/2π Im r(ω_q) Tr[M(q) Σ]     absorbed by the surface
//! P_LTE = 2∫₀^∞ dω/2π ω Tr[(ν − D) α_Im]                imbalance under LTE noise
//! ```
//!
//! P_in and P_out go through different code paths: P_in contracts the
//! tabulated kernels, P_out integrates the surface absorption over q for the
//! dipole spectrum Σ = α ν α†.

use std::f64::consts::PI;

use crate::dyad::trace_product;
use crate::error::Result;
use crate::kernels::{absorbed_trace, fdi_gap, kernels};
use crate::polarizability::dress;
use crate::quadrature::Each;
use crate::units::Scenario;

use super::plan::{doppler_edge, outer_tolerance, Plan};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerOptions {
    /// Replace Σ by its local-equilibrium form sgn(ω) α_Im in the P_out path.
    pub lte_substitute: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub v: f64,
    pub p_in: f64,
    pub p_out: f64,
    pub p_net: f64,
    pub p_lte: f64,
    pub p_lte_asymptotic: f64,
    pub err_in: f64,
    pub err_out: f64,
    pub err_net: f64,
    pub err_lte: f64,
    /// P_in and P_out restricted to the Doppler band [0, |v| q_max], where
    /// the nonequilibrium part of the noise lives.
    pub p_in_low: f64,
    pub p_out_low: f64,
    pub err_low: f64,
    pub lte_substituted: bool,
}

impl PowerReport {
    /// |P_in − P_out| over the combined error budget; balanced when ≤ 1.
    pub fn balance_ratio(&self, factor: f64) -> f64 {
        ratio(self.p_net.abs(), factor * self.err_net)
    }

    pub fn low_band_ratio(&self, factor: f64) -> f64 {
        ratio((self.p_in_low - self.p_out_low).abs(), factor * self.err_low)
    }
}

fn ratio(x: f64, budget: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / budget
    }
}

/// Leading small-velocity form 45 v⁴ α₀² ρ²/((2π)³ (2 z_a)¹⁰), ρ = Γ/ω_p².
pub fn lte_asymptote(s: &Scenario) -> f64 {
    let rho = s.material.resistivity();
    let a0 = s.static_alpha();
    45.0 * s.v.powi(4) * a0 * a0 * rho * rho / ((2.0 * PI).powi(3) * (2.0 * s.za).powi(10))
}

/// Spectral densities (in, out) of P_in and P_out at ω = center + offset.
fn in_out_density(s: &Scenario, center: f64, offset: f64, opts: PowerOptions) -> Result<Each<2>> {
    let omega = center + offset;
    let b = kernels(omega, s.v, s)?;
    let alpha = dress(center, offset, s.v, s, &b.delta)?;
    let alpha_im = alpha.alpha_im_from(&b.dissipation);
    let sigma = if opts.lte_substitute {
        alpha_im.scale(super::sign(omega))
    } else {
        alpha.sandwich(&b.noise)
    };
    let (absorbed, _) = absorbed_trace(omega, s.v, s, &sigma)?;
    let w = omega / PI;
    Ok(Each([w * trace_product(b.noise.matrix(), alpha_im.matrix()).re, w * absorbed]))
}

fn in_out(s: &Scenario, hi: f64, opts: PowerOptions) -> Result<([f64; 2], [f64; 2])> {
    let plan = Plan::new(s, hi)?;
    let r = plan.integrate(outer_tolerance(s), |c, d| in_out_density(s, c, d, opts))?;
    Ok((r.value.0, r.err_parts.0))
}

/// P_LTE with its error estimate. ν − D vanishes beyond the Doppler band.
pub fn lte_power(s: &Scenario) -> Result<(f64, f64)> {
    let edge = doppler_edge(s);
    if edge == 0.0 {
        return Ok((0.0, 0.0));
    }
    let plan = Plan::new(s, edge)?;
    let r = plan.integrate(outer_tolerance(s), |center, offset| {
        let omega = center + offset;
        let b = kernels(omega, s.v, s)?;
        let alpha = dress(center, offset, s.v, s, &b.delta)?;
        let alpha_im = alpha.alpha_im_from(&b.dissipation);
        let gap = fdi_gap(omega, s.v, s)?.value;
        Ok(omega / PI * trace_product(gap.matrix(), alpha_im.matrix()).re)
    })?;
    Ok((r.value, r.err))
}

pub fn power_balance(s: &Scenario) -> Result<PowerReport> {
    power_balance_with(s, PowerOptions::default())
}

pub fn power_balance_with(s: &Scenario, opts: PowerOptions) -> Result<PowerReport> {
    let ([p_in, p_out], [err_in, err_out]) = in_out(s, f64::INFINITY, opts)?;
    let edge = doppler_edge(s);
    let ([p_in_low, p_out_low], [e1, e2]) = if edge > 0.0 {
        in_out(s, edge, opts)?
    } else {
        ([0.0; 2], [0.0; 2])
    };
    let (p_lte, err_lte) = lte_power(s)?;
    Ok(PowerReport {
        v: s.v,
        p_in,
        p_out,
        p_net: p_in - p_out,
        p_lte,
        p_lte_asymptotic: lte_asymptote(s),
        err_in,
        err_out,
        err_net: err_in + err_out,
        err_lte,
        p_in_low,
        p_out_low,
        err_low: e1 + e2,
        lte_substituted: opts.lte_substitute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{MaterialParams, NumericsConfig};

    fn scenario(alpha0: f64, v: f64) -> Scenario {
        Scenario::new(
            0.25,
            alpha0,
            1.0,
            v,
            MaterialParams::internal(0.0055).unwrap(),
            NumericsConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_balance_and_zero_lte() {
        let s = scenario(1e-4, 0.0);
        let r = power_balance(&s).unwrap();
        assert!(r.p_in > 0.0);
        assert!(r.p_net.abs() <= 1e-8 * r.p_in, "{r:?}");
        assert_eq!(r.p_lte, 0.0);
        assert_eq!(r.p_in_low, 0.0);
    }

    #[test]
    fn moving_balance_and_lte_sign() {
        let s = scenario(1e-4, 3.1e-3);
        let r = power_balance(&s).unwrap();
        assert!(r.p_in > 0.0 && r.p_out > 0.0);
        assert!(r.p_net.abs() <= 1e-6 * r.p_in, "{r:?}");
        assert!(r.p_lte > 0.0);
        assert!((r.p_in_low - r.p_out_low).abs() <= 1e-6 * r.p_in_low);
    }

    #[test]
    fn lte_substitution_breaks_low_band_balance() {
        let s = scenario(1e-4, 3.1e-3);
        let r = power_balance_with(&s, PowerOptions { lte_substitute: true }).unwrap();
        let gap = r.p_in_low - r.p_out_low;
        assert!((gap - r.p_lte).abs() <= 1e-6 * r.p_lte, "{gap} vs {}", r.p_lte);
        assert!(r.low_band_ratio(3.0) > 1.0);
    }
}
