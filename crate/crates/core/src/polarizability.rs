//! Bare and dressed polarizability and the stationary dipole spectra.
//!
//! The dressed polarizability solves α = α_B [1 − α_B Δ]⁻¹, written here as
//! α = [α_B⁻¹ − Δ]⁻¹ so that it stays regular at the bare resonance. Its
//! anti-Hermitian part obeys α_Im = α D α† = α† D α.

use num_complex::Complex64;

use crate::dyad::{CMat3, HermitianDyad};
use crate::error::{Error, Result};
use crate::kernels::{kernels, KernelBundle};
use crate::units::Scenario;

/// Largest accepted condition number of α⁻¹.
pub const MAX_CONDITION: f64 = 1e12;

/// α_B(ω) = α₀ω_a²/(ω_a² − ω²).
pub fn alpha_bare(omega: f64, s: &Scenario) -> Result<f64> {
    let den = (s.omega_a - omega) * (s.omega_a + omega);
    if den == 0.0 {
        return Err(Error::Domain {
            what: "bare polarizability (atomic pole)",
            at: omega,
        });
    }
    Ok(s.static_alpha() * s.omega_a * s.omega_a / den)
}

/// 1/α_B at ω = center + offset. With `center` equal to ω_a the difference
/// ω_a − ω is exact, which resolves lines far narrower than ulp(ω_a).
pub fn inverse_bare(s: &Scenario, center: f64, offset: f64) -> f64 {
    let below = (s.omega_a - center) - offset;
    let above = s.omega_a + center + offset;
    below * above / (s.static_alpha() * s.omega_a * s.omega_a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedAlpha {
    pub omega: f64,
    pub v: f64,
    pub value: CMat3,
    /// 1-norm condition number of α⁻¹.
    pub condition: f64,
}

impl DressedAlpha {
    /// α_Im = (α − α†)/2i, from the definition.
    pub fn alpha_im(&self) -> HermitianDyad {
        HermitianDyad::hermitize((self.value - self.value.adjoint()) * Complex64::new(0.0, -0.5))
    }

    /// α X α†.
    pub fn sandwich(&self, x: &HermitianDyad) -> HermitianDyad {
        x.congruence(&self.value)
    }

    /// α_Im through α D α†; free of the cancellation in α − α† when
    /// α is nearly Hermitian.
    pub fn alpha_im_from(&self, d: &HermitianDyad) -> HermitianDyad {
        self.sandwich(d)
    }
}

fn norm1(m: &CMat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// α at ω = center + offset from a precomputed level shift Δ(ω, v).
pub fn dress(center: f64, offset: f64, v: f64, s: &Scenario, delta: &CMat3) -> Result<DressedAlpha> {
    let omega = center + offset;
    let a = CMat3::identity() * Complex64::new(inverse_bare(s, center, offset), 0.0) - delta;
    let inv = a.lu().try_inverse().ok_or(Error::NearSingular {
        cond: f64::INFINITY,
        omega,
    })?;
    let condition = norm1(&a) * norm1(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NearSingular { cond: condition, omega });
    }
    Ok(DressedAlpha {
        omega,
        v,
        value: inv,
        condition,
    })
}

pub fn alpha_dressed(omega: f64, v: f64, s: &Scenario) -> Result<DressedAlpha> {
    let b = kernels(omega, v, s)?;
    dress(0.0, omega, v, s, &b.delta)
}

/// Symmetric-ordered (Σ) and one-sided (S) dipole spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSpectrumDyad {
    pub omega: f64,
    pub v: f64,
    pub sigma: HermitianDyad,
    pub s: HermitianDyad,
}

/// Σ = α ν α†, S = α ν_θ α† from kernels and α at the same (ω, v).
pub fn spectra_from(bundle: &KernelBundle, alpha: &DressedAlpha) -> PowerSpectrumDyad {
    PowerSpectrumDyad {
        omega: alpha.omega,
        v: alpha.v,
        sigma: alpha.sandwich(&bundle.noise),
        s: alpha.sandwich(&bundle.one_sided()),
    }
}

pub fn sigma_spectrum(omega: f64, v: f64, s: &Scenario) -> Result<PowerSpectrumDyad> {
    let b = kernels(omega, v, s)?;
    let alpha = dress(0.0, omega, v, s, &b.delta)?;
    Ok(spectra_from(&b, &alpha))
}

/// A complex resonance of α(ω, v) near ω_a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPole {
    /// ω_k − ω_a; the imaginary part is minus the half-width.
    pub offset: Complex64,
}

impl DressedPole {
    pub fn center_offset(&self) -> f64 {
        self.offset.re
    }
    pub fn width(&self) -> f64 {
        self.offset.im.abs()
    }
}

/// Eigenvalues of Δ in the planar structure: yy and the two of the xz block.
fn planar_eigenvalues(d: &CMat3) -> [Complex64; 3] {
    let (a, e) = (d[(0, 0)], d[(2, 2)]);
    let half_tr = (a + e) * 0.5;
    let disc = ((a - e) * 0.5).powi(2) + d[(0, 2)] * d[(2, 0)];
    let root = disc.sqrt();
    [half_tr - root, d[(1, 1)], half_tr + root]
}

/// Poles ω_k² = ω_a²(1 − α₀λ_k(ω_k)), λ_k the eigenvalues of Δ(ω_k, v),
/// by two fixed-point passes starting from Δ(ω_a, v).
pub fn dressed_poles(s: &Scenario) -> Result<Vec<DressedPole>> {
    let wa = s.omega_a;
    let a0 = s.static_alpha();
    let offset_of = |lambda: Complex64| {
        let x = lambda * a0;
        let root = (Complex64::new(1.0, 0.0) - x).sqrt();
        -x * wa / (root + 1.0)
    };
    let start = planar_eigenvalues(&kernels(wa, s.v, s)?.delta);
    let mut poles = Vec::with_capacity(3);
    for lambda0 in start {
        let mut lambda = lambda0;
        for _ in 0..2 {
            let w = wa + offset_of(lambda).re;
            let eig = planar_eigenvalues(&kernels(w, s.v, s)?.delta);
            lambda = *eig
                .iter()
                .min_by(|x, y| (*x - lambda).norm().total_cmp(&(*y - lambda).norm()))
                .unwrap_or(&lambda);
        }
        poles.push(DressedPole {
            offset: offset_of(lambda),
        });
    }
    poles.sort_by(|a, b| a.offset.re.total_cmp(&b.offset.re));
    Ok(poles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyad::entry_norm;
    use crate::kernels::kernels;
    use crate::units::{MaterialParams, NumericsConfig};
    use proptest::prelude::*;

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
    fn bare_values() {
        let s = scenario(1e-3, 0.0);
        assert_eq!(alpha_bare(0.0, &s).unwrap(), 1e-3);
        assert!((alpha_bare(0.25 / 2f64.sqrt(), &s).unwrap() - 2e-3).abs() < 1e-17);
        let far = alpha_bare(1e6, &s).unwrap();
        assert!(far < 0.0 && far > -1e-15);
        assert!(alpha_bare(0.25, &s).is_err());
        assert!(alpha_bare(-0.25, &s).is_err());
        let w = 0.13;
        assert!((1.0 / inverse_bare(&s, 0.0, w) - alpha_bare(w, &s).unwrap()).abs() < 1e-17);
        assert!((inverse_bare(&s, 0.25, -0.12) - inverse_bare(&s, 0.0, 0.13)).abs() < 1e-9);
    }

    #[test]
    fn weak_coupling_limit() {
        let s = scenario(1e-8, 3.1e-3);
        let a = alpha_dressed(0.1, s.v, &s).unwrap();
        let ab = alpha_bare(0.1, &s).unwrap();
        let dev = entry_norm(&(a.value - CMat3::identity() * Complex64::new(ab, 0.0)));
        // α − α_B = α_B² Δ + O(α₀³)
        assert!(dev < 10.0 * ab * ab);
    }

    #[test]
    fn anti_hermitian_identity() {
        let s = scenario(1e-2, 3.1e-3);
        for w in [0.01, 0.2, 0.2501, 0.7] {
            let b = kernels(w, s.v, &s).unwrap();
            let a = dress(0.0, w, s.v, &s, &b.delta).unwrap();
            let x = a.alpha_im();
            let y = a.alpha_im_from(&b.dissipation);
            let z = HermitianDyad::hermitize(a.value.adjoint() * b.dissipation.matrix() * a.value);
            assert!(x.sub(&y).norm() <= 1e-8 * x.norm(), "omega {w}");
            assert!(x.sub(&z).norm() <= 1e-8 * x.norm(), "omega {w}");
        }
    }

    #[test]
    fn regular_at_bare_resonance() {
        // Scalar oracle: on the yy block α = 1/(α_B⁻¹ − Δ_yy) = −1/Δ_yy at ω_a.
        let s = scenario(1e-4, 0.0);
        let a = alpha_dressed(0.25, 0.0, &s).unwrap();
        let b = kernels(0.25, 0.0, &s).unwrap();
        for i in 0..3 {
            let scalar = -Complex64::new(1.0, 0.0) / b.delta[(i, i)];
            assert!((a.value[(i, i)] - scalar).norm() < 1e-12 * scalar.norm());
        }
        assert!(a.condition < 10.0);
    }

    #[test]
    fn equilibrium_spectra() {
        let s = scenario(1e-4, 0.0);
        for w in [0.05, 0.25, 0.9] {
            let p = sigma_spectrum(w, 0.0, &s).unwrap();
            let a = alpha_dressed(w, 0.0, &s).unwrap().alpha_im();
            assert!(p.sigma.sub(&a).norm() <= 1e-10 * a.norm());
            assert!(p.s.sub(&a.scale(2.0)).norm() <= 1e-10 * a.norm());
            let n = sigma_spectrum(-w, 0.0, &s).unwrap();
            let an = alpha_dressed(-w, 0.0, &s).unwrap().alpha_im();
            assert!(n.sigma.add(&an).norm() <= 1e-10 * an.norm());
            assert!(n.s.norm() == 0.0);
        }
    }

    #[test]
    fn static_spectrum_scales_with_coupling_squared() {
        let v = 3.1e-3;
        let n1 = sigma_spectrum(0.0, v, &scenario(1e-5, v)).unwrap().sigma.norm();
        let n2 = sigma_spectrum(0.0, v, &scenario(2e-5, v)).unwrap().sigma.norm();
        assert!(n1 > 0.0);
        assert!(((n2 / n1).log2() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn sigma_is_symmetrized_one_sided_spectrum() {
        let s = scenario(1e-3, 3.1e-3);
        for w in [1e-3, 0.05, 0.3] {
            let p = sigma_spectrum(w, s.v, &s).unwrap();
            let m = sigma_spectrum(-w, s.v, &s).unwrap();
            let sym = p.s.add(&m.s.transpose()).scale(0.5);
            assert!(p.sigma.sub(&sym).norm() <= 1e-8 * p.sigma.norm(), "omega {w}");
        }
    }

    #[test]
    fn poles_match_minimum_of_inverse() {
        let s = scenario(1e-4, 3.1e-3);
        let poles = dressed_poles(&s).unwrap();
        assert_eq!(poles.len(), 3);
        for p in &poles {
            assert!(p.offset.im < 0.0);
            // Along the real axis α peaks within a few widths of the pole.
            let peak = |dw: f64| {
                let b = kernels(0.25 + dw, s.v, &s).unwrap();
                entry_norm(&dress(0.25, dw, s.v, &s, &b.delta).unwrap().value)
            };
            let c = p.center_offset();
            let at = peak(c);
            assert!(at > peak(c + 20.0 * p.width()));
            assert!(at > peak(c - 20.0 * p.width()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn conjugation_symmetries(w in 0.0f64..1.5, v in 1e-4f64..1e-2) {
            let s = scenario(1e-3, v);
            let a = alpha_dressed(w, v, &s).unwrap().value;
            let am = alpha_dressed(-w, v, &s).unwrap().value;
            let amv = alpha_dressed(-w, -v, &s).unwrap().value;
            let scale = entry_norm(&a);
            prop_assert!(entry_norm(&(am - a.map(|z| z.conj()))) <= 1e-12 * scale);
            prop_assert!(entry_norm(&(a.adjoint() - amv)) <= 1e-9 * scale);
        }
    }
}
