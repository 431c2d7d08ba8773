//! Velocity-dependent kernels of the moving atom, as wavevector integrals of
//! the Doppler-shifted Green tensor, ω_q = ω + qv:
//!
//! ```text
//! Δ(ω,v)   = ∫dq/2π r(ω_q) M(q)                 level shift, complex
//! D(ω,v)   = ∫dq/2π Im r(ω_q) M(q)              dissipation, D = ωγ
//! ν(ω,v)   = ∫dq/2π |Im r(ω_q)| M(q)            noise
//! ν_θ(ω,v) = ∫dq/π  θ(ω_q) |Im r(ω_q)| M(q)     one-sided noise, = ν + D
//! ```
//!
//! The integrals run over |q| <= q_cutoff/(2 z_a) and are split at q = 0,
//! at the sign change q* = −ω/v of ω_q and where ω_q crosses ±ω_sp.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dyad::{CMat3, HermitianDyad};
use crate::error::Result;
use crate::greens::{dyad_parts, integrated_dyad};
use crate::material::reflection;
use crate::quadrature::{integrate, Domain, Groups, IntegrationResult, Tolerance};
use crate::units::Scenario;

/// A Hermitian kernel value at one (ω, v) with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub omega: f64,
    pub v: f64,
    pub value: HermitianDyad,
    pub err: f64,
}

/// Δ, D and ν at one (ω, v), from a single pass over q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBundle {
    pub omega: f64,
    pub v: f64,
    pub delta: CMat3,
    pub dissipation: HermitianDyad,
    pub noise: HermitianDyad,
    pub err_delta: f64,
    pub err_dissipation: f64,
    pub err_noise: f64,
}

impl KernelBundle {
    /// ν_θ = ν + D.
    pub fn one_sided(&self) -> HermitianDyad {
        self.noise.add(&self.dissipation)
    }
}

fn planar(p: &[f64; 4]) -> HermitianDyad {
    HermitianDyad::planar(p[0], p[1], p[2], p[3])
}

/// Points in q where the integrand has kinks or resonances.
fn q_breakpoints(omega: f64, v: f64, s: &Scenario) -> Vec<f64> {
    let mut b = vec![0.0];
    if v != 0.0 {
        let wsp = s.material.omega_sp();
        b.push(-omega / v);
        b.push((wsp - omega) / v);
        b.push((-wsp - omega) / v);
    }
    b
}

fn tolerance(s: &Scenario) -> Tolerance {
    Tolerance::new(s.numerics.rel_tol_quad)
}

/// ∫dq/2π w(r(ω+qv))·M(q) over [lo, hi] for G weight functions at once.
fn q_integral<const G: usize>(
    omega: f64,
    v: f64,
    s: &Scenario,
    lo: f64,
    hi: f64,
    weights: impl Fn(Complex64) -> [f64; G],
) -> Result<IntegrationResult<Groups<G>>> {
    let za = s.za;
    let m = s.material;
    let f = |q: f64| {
        let w = weights(reflection(&m, omega + q * v));
        let p = dyad_parts(q, za);
        let mut out = [[0.0; 4]; G];
        for g in 0..G {
            let c = w[g] / (2.0 * PI);
            for k in 0..4 {
                out[g][k] = c * p[k];
            }
        }
        Groups(out)
    };
    integrate(f, Domain::finite(lo, hi), &q_breakpoints(omega, v, s), tolerance(s))
}

/// Δ, D and ν in one pass.
pub fn kernels(omega: f64, v: f64, s: &Scenario) -> Result<KernelBundle> {
    if v == 0.0 {
        let r = reflection(&s.material, omega);
        let mi = integrated_dyad(s.za);
        return Ok(KernelBundle {
            omega,
            v,
            delta: mi.matrix() * r,
            dissipation: mi.scale(r.im),
            noise: mi.scale(r.im.abs()),
            err_delta: 0.0,
            err_dissipation: 0.0,
            err_noise: 0.0,
        });
    }
    let q = s.q_max();
    let res = q_integral(omega, v, s, -q, q, |r| [r.re, r.im, r.im.abs()])?;
    let [re, im, abs] = res.value.0;
    let re_d = planar(&re);
    let im_d = planar(&im);
    let group_err = |g: usize| res.err_parts.0[g].iter().sum::<f64>();
    Ok(KernelBundle {
        omega,
        v,
        delta: re_d.matrix() + im_d.matrix() * Complex64::new(0.0, 1.0),
        dissipation: im_d,
        noise: planar(&abs),
        err_delta: group_err(0) + group_err(1),
        err_dissipation: group_err(1),
        err_noise: group_err(2),
    })
}

fn single(
    omega: f64,
    v: f64,
    s: &Scenario,
    lo: f64,
    hi: f64,
    scale: f64,
    weight: impl Fn(Complex64) -> f64,
) -> Result<KernelSample> {
    if lo >= hi {
        return Ok(KernelSample {
            omega,
            v,
            value: HermitianDyad::zero(),
            err: 0.0,
        });
    }
    let res = q_integral(omega, v, s, lo, hi, |r| [weight(r)])?;
    Ok(KernelSample {
        omega,
        v,
        value: planar(&res.value.0[0]).scale(scale),
        err: res.err * scale,
    })
}

fn equilibrium(omega: f64, s: &Scenario, weight: impl Fn(Complex64) -> f64) -> KernelSample {
    KernelSample {
        omega,
        v: 0.0,
        value: integrated_dyad(s.za).scale(weight(reflection(&s.material, omega))),
        err: 0.0,
    }
}

/// Noise kernel ν(ω, v) = ∫dq/2π sgn(ω_q) G_Im(q, ω_q).
pub fn noise_kernel(omega: f64, v: f64, s: &Scenario) -> Result<KernelSample> {
    if v == 0.0 {
        return Ok(equilibrium(omega, s, |r| r.im.abs()));
    }
    let q = s.q_max();
    single(omega, v, s, -q, q, 1.0, |r| r.im.abs())
}

/// Dissipation kernel D(ω, v) = ωγ(ω, v) = ∫dq/2π G_Im(q, ω_q).
pub fn dissipation_kernel(omega: f64, v: f64, s: &Scenario) -> Result<KernelSample> {
    if v == 0.0 {
        return Ok(equilibrium(omega, s, |r| r.im));
    }
    let q = s.q_max();
    single(omega, v, s, -q, q, 1.0, |r| r.im)
}

/// Sub-interval of [−Q, Q] where sgn(v)·(ω + qv) has the sign of `positive`.
fn half_line(omega: f64, v: f64, s: &Scenario, positive: bool) -> (f64, f64) {
    let q = s.q_max();
    let qstar = -omega / v;
    // ω + qv > 0  <=>  q > q* for v > 0, q < q* for v < 0.
    if (v > 0.0) == positive {
        (qstar.max(-q), q)
    } else {
        (-q, qstar.min(q))
    }
}

/// One-sided kernel ν_θ(ω, v) = ∫dq/π θ(ω_q) G_Im(q, ω_q), integrated over
/// the half-line ω_q > 0 only.
pub fn one_sided_kernel(omega: f64, v: f64, s: &Scenario) -> Result<KernelSample> {
    if v == 0.0 {
        let theta = if omega > 0.0 { 2.0 } else { 0.0 };
        return Ok(equilibrium(omega, s, |r| theta * r.im.abs()));
    }
    let (lo, hi) = half_line(omega, v, s, true);
    single(omega, v, s, lo, hi, 2.0, |r| r.im.abs())
}

/// ν − sgn(ω)D = ∫dq/π θ(−sgn(ω) ω_q) |G_Im(q, ω_q)|, the fluctuation excess
/// over the local-equilibrium noise. Integrated over the wrong-sign part of
/// the Doppler-shifted spectrum only, so it carries no cancellation error.
pub fn fdi_gap(omega: f64, v: f64, s: &Scenario) -> Result<KernelSample> {
    if omega == 0.0 {
        return noise_kernel(omega, v, s);
    }
    if v == 0.0 {
        return Ok(KernelSample {
            omega,
            v,
            value: HermitianDyad::zero(),
            err: 0.0,
        });
    }
    let (lo, hi) = half_line(omega, v, s, omega < 0.0);
    single(omega, v, s, lo, hi, 2.0, |r| r.im.abs())
}

/// Level shift Δ(ω, v) = ∫dq/2π r(ω_q) M(q); the full complex r replaces the
/// principal-value construction. Returns the value and its error estimate.
pub fn level_shift(omega: f64, v: f64, s: &Scenario) -> Result<(CMat3, f64)> {
    let b = kernels(omega, v, s)?;
    Ok((b.delta, b.err_delta))
}

/// ∫dq/2π Im r(ω_q) Tr[M(q) X] for a Hermitian X: the power absorbed by the
/// surface from a dipole with spectrum X. Returns the value and error.
pub fn absorbed_trace(omega: f64, v: f64, s: &Scenario, x: &HermitianDyad) -> Result<(f64, f64)> {
    // Tr[M X] for M = planar(xx, yy, zz, b): Σ M_ii X_ii + (−ib) X_zx + (ib) X_xz.
    let (xxx, xyy, xzz) = (x[(0, 0)].re, x[(1, 1)].re, x[(2, 2)].re);
    let cross = -2.0 * x[(0, 2)].im;
    if v == 0.0 {
        let mi = integrated_dyad(s.za);
        let t = mi[(0, 0)].re * xxx + mi[(1, 1)].re * xyy + mi[(2, 2)].re * xzz;
        return Ok((reflection(&s.material, omega).im * t, 0.0));
    }
    let za = s.za;
    let m = s.material;
    let f = |q: f64| {
        let p = dyad_parts(q, za);
        let t = p[0] * xxx + p[1] * xyy + p[2] * xzz + p[3] * cross;
        reflection(&m, omega + q * v).im * t / (2.0 * PI)
    };
    let q = s.q_max();
    let res = integrate(f, Domain::finite(-q, q), &q_breakpoints(omega, v, s), tolerance(s))?;
    Ok((res.value, res.err))
}
