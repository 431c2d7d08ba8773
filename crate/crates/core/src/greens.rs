//! Near-field scattered Green tensor of a planar interface.
//!
//! In the quasi-static limit the reflection coefficient does not depend on
//! the in-plane wavevector, so the Green tensor at wavevector `q` along the
//! motion axis factorizes as G(q, ω) = r(ω)·M(q) with the geometric dyad
//!
//! ```text
//! M(q) = ∫ dp_y/2π (p/2) e^{-2 p z_a} Π Π†,   Π = ẑ − i p̂,   p = (q, p_y).
//! ```
//!
//! With A = 2|q|z_a the integral has the closed form
//!
//! ```text
//! M_xx = (q²/4π) 2K₀(A)      M_yy = (q²/4π) 2K₁(A)/A
//! M_zz = M_xx + M_yy         M_xz = −M_zx = −i (q|q|/4π) 2K₁(A)
//! ```
//!
//! The quadrature over p_y is kept as the reference; the closed form is the
//! fast path used by the kernels.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Matrix3;

use crate::dyad::{CMat3, HermitianDyad};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Domain, Tolerance};
use crate::table::CubicInterpolant;
use crate::units::MaterialParams;

/// M(q) at one wavevector and distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricDyad {
    pub q: f64,
    pub za: f64,
    pub value: HermitianDyad,
}

/// The four independent entries (xx, yy, zz, b) of M, with M_xz = −i·b.
pub type DyadParts = [f64; 4];

pub fn parts_to_dyad(p: &DyadParts) -> HermitianDyad {
    HermitianDyad::planar(p[0], p[1], p[2], p[3])
}

fn check_za(za: f64) -> Result<()> {
    if za > 0.0 && za.is_finite() {
        Ok(())
    } else {
        Err(Error::validation("za", format!("must be positive, got {za}")))
    }
}

/// (K₀(x), K₁(x)·e^{x}, K₀(x)·e^{x}) helper: returns the exponentially scaled
/// pair e^{x}K₀(x), e^{x}K₁(x) for x > 0.
///
/// Trapezoidal rule on K_n(x) = ∫₀^∞ e^{−x cosh t} cosh(nt) dt, which
/// converges geometrically because the integrand is analytic in a strip.
pub fn bessel_k01_scaled(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    let h = (0.5 / x.sqrt()).min(0.125);
    let t_peak = if x < 1.0 { (1.0 / x).acosh() } else { 0.0 };
    let mut k0 = 0.5;
    let mut k1 = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let c = t.cosh();
        let e = (-x * (c - 1.0)).exp();
        let (d0, d1) = (e, e * c);
        k0 += d0;
        k1 += d1;
        if t > t_peak && d1 < 1e-17 * k1 {
            break;
        }
        k += 1;
    }
    (h * k0, h * k1)
}

/// K₀(x) and K₁(x) for x > 0.
pub fn bessel_k01(x: f64) -> (f64, f64) {
    let (k0, k1) = bessel_k01_scaled(x);
    let s = (-x).exp();
    (k0 * s, k1 * s)
}

/// Closed-form entries of M(q, z_a).
pub fn dyad_parts(q: f64, za: f64) -> DyadParts {
    if q == 0.0 {
        let c = 1.0 / (8.0 * PI * za * za);
        return [0.0, c, c, 0.0];
    }
    let a_arg = 2.0 * q.abs() * za;
    let (k0, k1) = bessel_k01(a_arg);
    let pref = q * q / (2.0 * PI);
    let xx = pref * k0;
    let yy = pref * k1 / a_arg;
    [xx, yy, xx + yy, q.signum() * pref * k1]
}

/// M(q, z_a) by adaptive quadrature over p_y (reference path).
pub fn geometric_dyad(q: f64, za: f64) -> Result<GeometricDyad> {
    check_za(za)?;
    let qa = q.abs();
    // Truncate where the envelope has dropped by 1e-18 relative to its value at p_y = 0.
    let p_max = qa + 18.0 * std::f64::consts::LN_10 / (2.0 * za);
    let py_max = (p_max * p_max - q * q).sqrt();
    let integrand = |py: f64| -> [f64; 4] {
        let p = q.hypot(py);
        if p == 0.0 {
            return [0.0; 4];
        }
        // Both halves of the even p_y integrand.
        let w = 2.0 * (p / 2.0) * (-2.0 * p * za).exp() / (2.0 * PI);
        [w * q * q / (p * p), w * py * py / (p * p), w, w * q / p]
    };
    let breaks = [qa, 1.0 / za];
    let tol = Tolerance::new(1e-13).with_abs(1e-300);
    let res = integrate(integrand, Domain::finite(0.0, py_max), &breaks, tol)?;
    Ok(GeometricDyad {
        q,
        za,
        value: parts_to_dyad(&res.value),
    })
}

/// M(q, z_a) from the closed form.
pub fn geometric_dyad_fast(q: f64, za: f64) -> Result<GeometricDyad> {
    check_za(za)?;
    Ok(GeometricDyad {
        q,
        za,
        value: parts_to_dyad(&dyad_parts(q, za)),
    })
}

/// ∫dq/2π M(q, z_a) = diag(1, 1, 2)/(32π z_a³).
pub fn integrated_dyad(za: f64) -> HermitianDyad {
    let s = 1.0 / (32.0 * PI * za.powi(3));
    HermitianDyad::from_real_diagonal([s, s, 2.0 * s])
}

/// G_Im(q, ω) = Im r(ω)·M(q). Odd in ω through Im r.
pub fn g_im(q: f64, za: f64, omega: f64, m: &MaterialParams) -> Result<HermitianDyad> {
    let r = crate::material::r_tm(m, omega)?;
    Ok(geometric_dyad_fast(q, za)?.value.scale(r.im))
}

/// sgn(ω)·G_Im(q, ω) = |Im r(ω)|·M(q); even in ω and PSD.
pub fn g_im_tilde(q: f64, za: f64, omega: f64, m: &MaterialParams) -> Result<HermitianDyad> {
    let r = crate::material::r_tm(m, omega)?;
    Ok(geometric_dyad_fast(q, za)?.value.scale(r.im.abs()))
}

/// Full scattered Green tensor r(ω)·M(q).
pub fn g_full(q: f64, za: f64, omega: f64, m: &MaterialParams) -> Result<CMat3> {
    let r = crate::material::r_tm(m, omega)?;
    Ok(geometric_dyad_fast(q, za)?.value.matrix() * r)
}

/// ∫dq/2π e^{iqs} M(q): the field of the image dipole at in-plane offset `s`,
/// (3R̂R̂ᵀ − 1)·diag(−1, −1, 1)/(4π|R|³) with R = (s, 0, 2z_a).
pub fn geometric_dyad_real_space(s: f64, za: f64) -> Matrix3<f64> {
    let rz = 2.0 * za;
    let r2 = s * s + rz * rz;
    let r = r2.sqrt();
    let n = [s / r, 0.0, rz / r];
    let mirror = [-1.0, -1.0, 1.0];
    let pref = 1.0 / (4.0 * PI * r2 * r);
    Matrix3::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        pref * (3.0 * n[i] * n[j] - delta) * mirror[j]
    })
}

/// M(q) tabulated on a grid of |q| for inspection and interpolation.
#[derive(Debug, Clone)]
pub struct GeometricDyadTable {
    pub za: f64,
    spline: CubicInterpolant,
}

impl GeometricDyadTable {
    /// Reference quadrature on `n` nodes: q = 0 and log-spaced |q| from
    /// 1e-6·q_max to q_max.
    pub fn build(za: f64, q_max: f64, n: usize) -> Result<Self> {
        check_za(za)?;
        if n < 4 || !(q_max > 0.0) {
            return Err(Error::validation("table", "need n >= 4 and q_max > 0"));
        }
        let lo = (1e-6 * q_max).ln();
        let hi = q_max.ln();
        let mut grid = vec![0.0];
        grid.extend((0..n - 1).map(|k| (lo + (hi - lo) * k as f64 / (n - 2) as f64).exp()));
        let mut values = Vec::with_capacity(4 * n);
        for &q in &grid {
            let g = geometric_dyad(q, za)?.value;
            values.extend([g[(0, 0)].re, g[(1, 1)].re, g[(2, 2)].re, -g[(0, 2)].im]);
        }
        Ok(GeometricDyadTable {
            za,
            spline: CubicInterpolant::new(grid, values, 4)?,
        })
    }

    /// Cubic interpolation; M(−q) = Mᵀ(q).
    pub fn eval(&self, q: f64) -> DyadParts {
        let v = self.spline.eval(q.abs());
        [v[0], v[1], v[2], q.signum() * v[3]]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "q,za,m_xx,m_yy,m_zz,im_m_zx")?;
        for (k, &q) in self.spline.grid().iter().enumerate() {
            let v = self.spline.node(k);
            writeln!(
                w,
                "{q:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                self.za, v[0], v[1], v[2], v[3]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::dyad::entry_norm;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bessel_values() {
        // Reference values from an independent special-function library.
        let cases = [
            (1e-8, 18.53661225961078, 99999999.99999991),
            (1e-3, 7.0236888005623825, 999.9962381560855),
            (0.1, 2.4270690247020164, 9.853844780870606),
            (1.0, 0.42102443824070823, 0.6019072301972346),
            (2.5, 0.062347553200366196, 0.07389081634774705),
            (10.0, 1.778006231616765e-05, 1.8648773453825585e-05),
            (40.0, 8.392861100099567e-19, 8.497131954861038e-19),
            (80.0, 2.5251198425054717e-36, 2.5408531275211695e-36),
        ];
        for (x, k0, k1) in cases {
            let (a, b) = bessel_k01(x);
            assert!(rel(a, k0) < 2e-14, "K0({x}) = {a}");
            assert!(rel(b, k1) < 2e-14, "K1({x}) = {b}");
        }
    }

    #[test]
    fn structural_zeros() {
        for q in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            let m = geometric_dyad(q, 1.3).unwrap().value;
            for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
                assert_eq!(m[(i, j)], Complex64::new(0.0, 0.0));
            }
            for i in 0..3 {
                assert_eq!(m[(i, i)].im, 0.0);
            }
            assert_eq!(m[(0, 2)].re, 0.0);
        }
    }

    #[test]
    fn closed_form_matches_reference_quadrature() {
        for za in [0.5, 1.0, 2.0] {
            for q in [0.0, 1e-7, 1e-3, 0.05, 0.3, 1.0, 4.0, 15.0, -2.0] {
                let r = geometric_dyad(q, za).unwrap().value;
                let f = geometric_dyad_fast(q, za).unwrap().value;
                let d = entry_norm(&(r.matrix() - f.matrix()));
                assert!(d <= 1e-12 * r.norm(), "q={q} za={za}: {d:e} vs {:e}", r.norm());
            }
        }
    }

    #[test]
    fn q_integral_equals_diag_1_1_2() {
        // ∫dq/2π M(q): trace 1/(8π z³), shape diag(1,1,2)/(32π z³).
        for za in [0.7, 1.0] {
            let tol = Tolerance::new(1e-12);
            let half = integrate(
                |q: f64| {
                    let p = dyad_parts(q, za);
                    [p[0] / PI, p[1] / PI, p[2] / PI]
                },
                Domain::ExpTail { a: 0.0, scale: 1.0 / za },
                &[],
                tol,
            )
            .unwrap()
            .value;
            let target = integrated_dyad(za);
            for i in 0..3 {
                assert!(rel(half[i], target[(i, i)].re) < 1e-10);
            }
            assert!(rel(target.trace(), 1.0 / (8.0 * PI * za.powi(3))) < 1e-15);
        }
    }

    #[test]
    fn brute_force_two_dimensional_sum_of_the_trace() {
        // Riemann sum of ∫d²p/(2π)² (p/2) e^{-2p} Tr ΠΠ† with Tr ΠΠ† = 2.
        let h = 0.01;
        let mut total = 0.0;
        for i in -1500..=1500 {
            for j in -1500..=1500 {
                let p = (i as f64 * h).hypot(j as f64 * h);
                total += p * (-2.0 * p).exp();
            }
        }
        total *= h * h / (4.0 * PI * PI);
        assert!(rel(total, 1.0 / (8.0 * PI)) < 1e-4);
    }

    #[test]
    fn exponential_decay_at_large_q() {
        for za in [0.5, 1.0, 2.0] {
            let q1 = 60.0 / za;
            let q2 = 61.0 / za;
            let a = geometric_dyad(q1, za).unwrap().value.trace();
            let b = geometric_dyad(q2, za).unwrap().value.trace();
            let slope = (b.ln() - a.ln()) / (q2 - q1);
            assert!((slope / (-2.0 * za) - 1.0).abs() < 0.02, "za={za}: slope {slope}");
        }
    }

    #[test]
    fn green_tensor_consistency() {
        let m = MaterialParams::internal(0.05).unwrap();
        for q in [-1.0, 0.3] {
            let gi = g_im(q, 1.0, 0.8, &m).unwrap();
            let gf = g_full(q, 1.0, 0.8, &m).unwrap();
            // For a Hermitian M and complex scalar r, the anti-Hermitian part of rM is Im r·M.
            let anti = (gf - gf.adjoint()) / Complex64::new(0.0, 2.0);
            assert!(entry_norm(&(anti - gi.matrix())) < 1e-15);
            assert!(gi.is_psd(0.0));
            let back = g_im(-q, 1.0, 0.8, &m).unwrap().transpose();
            assert!(entry_norm(&(back.matrix() - gi.matrix())) <= 1e-13 * gi.norm());
            let tilde = g_im_tilde(q, 1.0, -0.8, &m).unwrap();
            assert_eq!(tilde, gi);
        }
        assert!(entry_norm(&g_full(0.3, 1.0, 1e9, &m).unwrap()) < 1e-17);
        let lossless = MaterialParams::internal(1e-12).unwrap();
        assert!(g_im(0.3, 1.0, 0.2, &lossless).unwrap().norm() < 1e-12);
        let static_g = g_full(0.4, 1.0, 0.0, &m).unwrap();
        assert_eq!(static_g, *geometric_dyad_fast(0.4, 1.0).unwrap().value.matrix());
    }

    #[test]
    fn real_space_dyad_is_the_fourier_transform() {
        for s in [0.0, 0.4, -1.3, 3.0] {
            let target = geometric_dyad_real_space(s, 1.0);
            let tol = Tolerance::new(1e-11);
            // ∫dq/2π e^{iqs} M(q): diagonal ∫ cos(qs) M_ii/π, xz = ∫ sin(qs) b/π over q > 0.
            let v = integrate(
                |q: f64| {
                    let p = dyad_parts(q, 1.0);
                    let (c, sn) = ((q * s).cos(), (q * s).sin());
                    [c * p[0] / PI, c * p[1] / PI, c * p[2] / PI, sn * p[3] / PI]
                },
                Domain::ExpTail { a: 0.0, scale: 1.0 },
                &[],
                tol,
            )
            .unwrap()
            .value;
            assert!((v[0] - target[(0, 0)]).abs() < 1e-10);
            assert!((v[1] - target[(1, 1)]).abs() < 1e-10);
            assert!((v[2] - target[(2, 2)]).abs() < 1e-10);
            assert!((v[3] - target[(0, 2)]).abs() < 1e-10);
            assert!((target[(2, 0)] + target[(0, 2)]).abs() < 1e-15);
        }
        let m0 = geometric_dyad_real_space(0.0, 1.0);
        let mi = integrated_dyad(1.0);
        for i in 0..3 {
            assert!(rel(m0[(i, i)], mi[(i, i)].re) < 1e-15);
        }
    }

    #[test]
    fn table_interpolates_and_dumps() {
        let t = GeometricDyadTable::build(1.0, 20.0, 2000).unwrap();
        for q in [-5.0, 0.02, 0.9, 7.5] {
            let a = t.eval(q);
            let b = dyad_parts(q, 1.0);
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-6 * (b[2].abs() + 1e-300));
            }
        }
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2001);
    }

    #[test]
    fn rejects_nonpositive_distance() {
        assert!(geometric_dyad(1.0, 0.0).is_err());
        assert!(geometric_dyad_fast(1.0, -1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn geometric_dyad_is_psd_and_reciprocal(q in -30.0f64..30.0, za in 0.2f64..5.0) {
            let m = geometric_dyad(q, za).unwrap().value;
            prop_assert!(m.is_psd(1e-12));
            let mt = geometric_dyad(-q, za).unwrap().value.transpose();
            prop_assert!(entry_norm(&(mt.matrix() - m.matrix())) <= 1e-13 * m.norm());
        }
    }
}
