//! Spectral energy of the dipole,
//! 𝓔(ω, v) = (1/2π) ((ω_a² + ω²)/ω_a²) Tr Σ(ω, v)/α₀, and its integral E.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::kernels;
use crate::polarizability::{dress, dressed_poles};
use crate::units::Scenario;

use super::plan::{outer_tolerance, Plan};

fn weight(s: &Scenario, omega: f64) -> f64 {
    let wa = s.omega_a;
    (wa * wa + omega * omega) / (wa * wa * 2.0 * PI * s.static_alpha())
}

/// 𝓔 and its local-equilibrium counterpart 𝓔_LTE (Σ → sgn(ω) α_Im) at
/// ω = center + offset.
fn energies(s: &Scenario, v: f64, center: f64, offset: f64) -> Result<(f64, f64)> {
    let omega = center + offset;
    let b = kernels(omega, v, s)?;
    let alpha = dress(center, offset, v, s, &b.delta)?;
    let sigma = alpha.sandwich(&b.noise);
    let lte = alpha.alpha_im_from(&b.dissipation).scale(super::sign(omega));
    let w = weight(s, omega);
    Ok((w * sigma.trace(), w * lte.trace()))
}

pub fn spectral_energy(omega: f64, v: f64, s: &Scenario) -> Result<f64> {
    check_omega(omega)?;
    Ok(energies(s, v, 0.0, omega)?.0)
}

/// 𝓔 with the local-equilibrium spectrum; vanishes at ω = 0 for every v.
pub fn spectral_energy_lte(omega: f64, v: f64, s: &Scenario) -> Result<f64> {
    check_omega(omega)?;
    Ok(energies(s, v, 0.0, omega)?.1)
}

fn check_omega(omega: f64) -> Result<()> {
    if omega >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "spectral energy needs ω ≥ 0",
            at: omega,
        })
    }
}

/// E = ∫₀^∞ 𝓔 dω with its error estimate; 3ω_a/2 in the weak-coupling,
/// equilibrium limit.
pub fn total_energy(s: &Scenario) -> Result<(f64, f64)> {
    if s.alpha0 > crate::units::WEAK_COUPLING_WARN {
        log::warn!("total energy at strong coupling, alpha0 = {}", s.alpha0);
    }
    let plan = Plan::new(s, f64::INFINITY)?;
    let r = plan.integrate(outer_tolerance(s), |c, d| Ok(energies(s, s.v, c, d)?.0))?;
    Ok((r.value, r.err))
}

/// Born–Markov spectral energy: a Lorentzian of half-width γ_a at ω_a
/// carrying the dipole variance `d2`.
pub fn bm_spectral_energy(omega: f64, gamma_a: f64, d2: f64, s: &Scenario) -> Result<f64> {
    if !(gamma_a > 0.0) {
        return Err(Error::validation("gamma_a", format!("must be positive, got {gamma_a}")));
    }
    let wa = s.omega_a;
    let lorentz = gamma_a / ((omega - wa).powi(2) + gamma_a * gamma_a);
    Ok(d2 / (2.0 * PI * s.static_alpha()) * (wa * wa + omega * omega) / (wa * wa) * lorentz)
}

/// Born–Markov parameters matched to the scenario: mean width of the dressed
/// poles and the variance that gives E = 3ω_a/2.
pub fn bm_parameters(s: &Scenario) -> Result<(f64, f64)> {
    let poles = dressed_poles(s)?;
    let gamma = poles.iter().map(|p| p.width()).sum::<f64>() / poles.len() as f64;
    Ok((gamma, 1.5 * s.static_alpha() * s.omega_a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub omega: f64,
    pub energy: f64,
    pub energy_lte: f64,
    pub energy_bm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub v: f64,
    pub samples: Vec<EnergySample>,
    /// 𝓔(0, v).
    pub zero_frequency: f64,
    pub total: f64,
    pub total_err: f64,
}

/// Samples 𝓔, 𝓔_LTE and 𝓔^BM on `grid` and integrates E.
pub fn energy_report(s: &Scenario, grid: &[f64]) -> Result<EnergyReport> {
    let (gamma, d2) = bm_parameters(s)?;
    let samples = grid
        .iter()
        .map(|&w| {
            check_omega(w)?;
            let (energy, energy_lte) = energies(s, s.v, 0.0, w)?;
            Ok(EnergySample {
                omega: w,
                energy,
                energy_lte,
                energy_bm: bm_spectral_energy(w, gamma, d2, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (total, total_err) = total_energy(s)?;
    Ok(EnergyReport {
        v: s.v,
        samples,
        zero_frequency: spectral_energy(0.0, s.v, s)?,
        total,
        total_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Domain, Tolerance};
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
    fn equilibrium_total_energy() {
        let s = scenario(1e-6, 0.0);
        let (e, err) = total_energy(&s).unwrap();
        assert!((e / (1.5 * 0.25) - 1.0).abs() < 1e-3, "{e} ± {err}");
        assert_eq!(spectral_energy(0.0, 0.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn zero_frequency_signature() {
        let v = 3.1e-3;
        let s = scenario(1e-4, v);
        let e = spectral_energy(0.0, v, &s).unwrap();
        assert!(e > 0.0);
        assert!((spectral_energy(0.0, -v, &s).unwrap() / e - 1.0).abs() < 1e-9);
        assert_eq!(spectral_energy_lte(0.0, v, &s).unwrap(), 0.0);
        for w in [1e-3, 0.1, 0.3] {
            let a = spectral_energy(w, v, &s).unwrap();
            let b = spectral_energy(w, -v, &s).unwrap();
            assert!(a >= 0.0 && (a - b).abs() <= 1e-8 * a);
        }
    }

    #[test]
    fn born_markov_contrast() {
        let s = scenario(1e-4, 0.0);
        let (g, d2) = (1e-3, 2.0);
        let e0 = bm_spectral_energy(0.0, g, d2, &s).unwrap();
        let closed = d2 / (2.0 * PI * s.static_alpha()) * g / (0.0625 + g * g);
        assert!((e0 / closed - 1.0).abs() < 1e-14 && e0 > 0.0);
        assert!(bm_spectral_energy(0.1, 0.0, d2, &s).is_err());
        // Numeric integral over [0, B] against the exact antiderivative; the
        // latter tends to the residue d2/α₀ as γ_a → 0.
        let wa = 0.25;
        let big = 4.0;
        let residue = d2 / s.static_alpha();
        let exact = |g: f64| {
            let f = |x: f64| {
                (2.0 - g * g / (wa * wa)) * (x / g).atan() + g * x / (wa * wa) + g / wa * (x * x + g * g).ln()
            };
            residue / (2.0 * PI) * (f(big - wa) - f(-wa))
        };
        for g in [1e-3, 1e-5] {
            let r = integrate(
                |w: f64| bm_spectral_energy(w, g, d2, &s).unwrap(),
                Domain::Sinh {
                    a: 0.0,
                    b: big,
                    center: wa,
                    width: g,
                },
                &[],
                Tolerance::new(1e-12),
            )
            .unwrap();
            assert!((r.value / exact(g) - 1.0).abs() < 1e-10);
        }
        assert!((exact(1e-7) / residue - 1.0).abs() < 1e-5);
    }
}
