//! Complex 3×3 Hermitian matrices (x = motion axis, z = surface normal).

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat3 = Matrix3<Complex64>;

/// Relative tolerance below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;

/// A Hermitian 3×3 matrix. Construction enforces exact Hermiticity by
/// averaging with the adjoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianDyad(CMat3);

impl HermitianDyad {
    pub fn zero() -> Self {
        HermitianDyad(CMat3::zeros())
    }

    /// Accepts `m` if it is Hermitian to [`HERMITIAN_TOL`] relative to its norm.
    pub fn new(m: CMat3) -> Result<Self> {
        let dev = entry_norm(&(m - m.adjoint()));
        let scale = entry_norm(&m);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::validation(
                "dyad",
                format!("not Hermitian: |M - M^H| = {dev:.3e}, |M| = {scale:.3e}"),
            ));
        }
        Ok(Self::hermitize(m))
    }

    /// (m + m†)/2, without checking.
    pub fn hermitize(m: CMat3) -> Self {
        HermitianDyad((m + m.adjoint()).scale(0.5))
    }

    /// The structure shared by every kernel of the planar geometry:
    /// real diagonal (xx, yy, zz), xz = −i·b, zx = i·b, all else zero.
    pub fn planar(xx: f64, yy: f64, zz: f64, b: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut m = CMat3::zeros();
        m[(0, 0)] = c(xx);
        m[(1, 1)] = c(yy);
        m[(2, 2)] = c(zz);
        m[(0, 2)] = Complex64::new(0.0, -b);
        m[(2, 0)] = Complex64::new(0.0, b);
        HermitianDyad(m)
    }

    pub fn from_real_diagonal(d: [f64; 3]) -> Self {
        Self::planar(d[0], d[1], d[2], 0.0)
    }

    pub fn matrix(&self) -> &CMat3 {
        &self.0
    }

    pub fn into_matrix(self) -> CMat3 {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn transpose(&self) -> Self {
        HermitianDyad(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianDyad(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianDyad(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianDyad(self.0 - other.0)
    }

    /// A X A† for an arbitrary complex A.
    pub fn congruence(&self, a: &CMat3) -> Self {
        Self::hermitize(a * self.0 * a.adjoint())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        let mut v = [e[0], e[1], e[2]];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Positive semidefinite up to `−tol·scale`, with `scale` the trace norm
    /// (sum of absolute eigenvalues).
    pub fn is_psd(&self, tol: f64) -> bool {
        self.psd_margin(tol) >= 0.0
    }

    /// min eigenvalue + tol·Σ|λ|; nonnegative iff [`Self::is_psd`].
    pub fn psd_margin(&self, tol: f64) -> f64 {
        let e = self.eigenvalues();
        let scale: f64 = e.iter().map(|x| x.abs()).sum();
        e[0] + tol * scale
    }

    /// Returns an error naming `what` unless the dyad is PSD within `tol`.
    pub fn check_psd(&self, what: &'static str, tol: f64) -> Result<()> {
        if self.is_psd(tol) {
            Ok(())
        } else {
            Err(Error::NotPsd {
                what,
                min_eig: self.min_eigenvalue(),
                trace: self.trace(),
            })
        }
    }

    /// Hermitian square root of a PSD dyad. Slightly negative eigenvalues
    /// (within `tol` of the trace norm) are clipped to zero.
    pub fn sqrt_psd(&self, what: &'static str, tol: f64) -> Result<CMat3> {
        let eig = SymmetricEigen::new(self.0);
        let scale: f64 = eig.eigenvalues.iter().map(|x| x.abs()).sum();
        let mut d = CMat3::zeros();
        for i in 0..3 {
            let l = eig.eigenvalues[i];
            if l < -tol * scale {
                return Err(Error::NotPsd {
                    what,
                    min_eig: l,
                    trace: self.trace(),
                });
            }
            d[(i, i)] = Complex64::new(l.max(0.0).sqrt(), 0.0);
        }
        let u = eig.eigenvectors;
        Ok(u * d * u.adjoint())
    }

    /// Sum of absolute values of the real and imaginary parts of all entries.
    pub fn norm(&self) -> f64 {
        entry_norm(&self.0)
    }
}

impl std::ops::Index<(usize, usize)> for HermitianDyad {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

pub fn entry_norm(m: &CMat3) -> f64 {
    m.iter().map(|z| z.re.abs() + z.im.abs()).sum()
}

/// Tr(A B) for arbitrary complex matrices.
pub fn trace_product(a: &CMat3, b: &CMat3) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}
