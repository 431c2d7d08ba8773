//! Tabulated functions: vector-valued piecewise cubic interpolation and the
//! dyad-valued [`SpectralTable`] built on it.

use std::io::Write;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::dyad::{entry_norm, CMat3};
use crate::error::{Error, Result};

/// Piecewise cubic interpolation of vector-valued samples `(x_i, y_i)`: on
/// each interval the cubic through the four nearest nodes (one-sided at the
/// ends). Fourth-order accurate up to the boundary, no global solve.
#[derive(Debug, Clone)]
pub struct CubicInterpolant {
    x: Vec<f64>,
    width: usize,
    y: Vec<f64>,
}

impl CubicInterpolant {
    /// `y` holds `x.len()` rows of `width` values, row-major.
    pub fn new(x: Vec<f64>, y: Vec<f64>, width: usize) -> Result<Self> {
        let n = x.len();
        if n < 4 || width == 0 || y.len() != n * width {
            return Err(Error::validation("interpolant", "need at least four nodes and matching data"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("interpolant", "grid must be strictly increasing"));
        }
        Ok(CubicInterpolant { x, width, y })
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.y[i * self.width..(i + 1) * self.width]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x[0] && x <= self.x[self.x.len() - 1]
    }

    /// Evaluates into `out`; outside the grid the end cubic is extrapolated.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        let n = self.x.len();
        let i = match self.x.partition_point(|&g| g <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let s = i.saturating_sub(1).min(n - 4);
        let xs = &self.x[s..s + 4];
        let mut l = [0.0; 4];
        for (j, lj) in l.iter_mut().enumerate() {
            let mut p = 1.0;
            for k in 0..4 {
                if k != j {
                    p *= (x - xs[k]) / (xs[j] - xs[k]);
                }
            }
            *lj = p;
        }
        let w = self.width;
        for (k, o) in out.iter_mut().enumerate().take(w) {
            *o = (0..4).map(|j| l[j] * self.y[(s + j) * w + k]).sum();
        }
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        self.eval_into(x, &mut out);
        out
    }
}

fn flatten(m: &CMat3, out: &mut Vec<f64>) {
    for z in m.iter() {
        out.push(z.re);
        out.push(z.im);
    }
}

fn unflatten(v: &[f64]) -> CMat3 {
    Matrix3::from_iterator((0..9).map(|k| Complex64::new(v[2 * k], v[2 * k + 1])))
}

/// Cached samples of a dyad-valued function of frequency with cubic
/// interpolation in between.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    spline: CubicInterpolant,
    err: Vec<f64>,
    /// Interpolation error estimate from the half-resolution comparison.
    pub refinement_error: f64,
    /// Velocity the table was computed at; informational.
    pub v: f64,
}

impl SpectralTable {
    /// Samples `f` on `grid` (strictly increasing). `f` returns the value and
    /// its absolute error estimate.
    pub fn build<F>(grid: Vec<f64>, v: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(CMat3, f64)>,
    {
        let samples = grid.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;
        Self::from_samples(grid, v, samples)
    }

    pub fn from_samples(grid: Vec<f64>, v: f64, samples: Vec<(CMat3, f64)>) -> Result<Self> {
        let mut y = Vec::with_capacity(18 * grid.len());
        let mut err = Vec::with_capacity(grid.len());
        for (m, e) in &samples {
            flatten(m, &mut y);
            err.push(*e);
        }
        let spline = CubicInterpolant::new(grid, y, 18)?;
        let refinement_error = half_resolution_error(&spline);
        Ok(SpectralTable {
            spline,
            err,
            refinement_error,
            v,
        })
    }

    pub fn grid(&self) -> &[f64] {
        self.spline.grid()
    }

    pub fn contains(&self, omega: f64) -> bool {
        self.spline.contains(omega)
    }

    pub fn node(&self, i: usize) -> CMat3 {
        unflatten(self.spline.node(i))
    }

    pub fn eval(&self, omega: f64) -> CMat3 {
        let mut buf = [0.0; 18];
        self.spline.eval_into(omega, &mut buf);
        unflatten(&buf)
    }

    /// Writes `omega, v, re_ij, im_ij (row-major), err` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("omega,v");
        for i in ["x", "y", "z"] {
            for j in ["x", "y", "z"] {
                header.push_str(&format!(",re_{i}{j},im_{i}{j}"));
            }
        }
        writeln!(w, "{header},err")?;
        for (k, &omega) in self.grid().iter().enumerate() {
            let m = self.node(k);
            let mut row = format!("{omega:.12e},{:.12e}", self.v);
            for i in 0..3 {
                for j in 0..3 {
                    row.push_str(&format!(",{:.12e},{:.12e}", m[(i, j)].re, m[(i, j)].im));
                }
            }
            writeln!(w, "{row},{:.3e}", self.err[k])?;
        }
        Ok(())
    }
}

/// Largest deviation, relative to the largest node, between the odd nodes and
/// a cubic through the even nodes only.
fn half_resolution_error(s: &CubicInterpolant) -> f64 {
    let n = s.grid().len();
    if n < 5 {
        return f64::INFINITY;
    }
    let xs: Vec<f64> = (0..n).step_by(2).map(|i| s.grid()[i]).collect();
    let ys: Vec<f64> = (0..n).step_by(2).flat_map(|i| s.node(i).to_vec()).collect();
    let Ok(coarse) = CubicInterpolant::new(xs, ys, s.width()) else {
        return f64::INFINITY;
    };
    let scale = (0..n)
        .map(|i| entry_norm(&unflatten(s.node(i))))
        .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut buf = vec![0.0; s.width()];
    for i in (1..n).step_by(2) {
        coarse.eval_into(s.grid()[i], &mut buf);
        let d: f64 = buf.iter().zip(s.node(i)).map(|(a, b)| (a - b).abs()).sum();
        worst = worst.max(d);
    }
    if scale > 0.0 {
        worst / scale
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolant_accuracy() {
        let x: Vec<f64> = (0..201).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().flat_map(|&t| [t.sin(), (-t).exp()]).collect();
        let s = CubicInterpolant::new(x, y, 2).unwrap();
        for k in 0..100 {
            let t = 1.0 + 0.0713 * k as f64;
            let v = s.eval(t);
            assert!((v[0] - t.sin()).abs() < 1e-6);
            assert!((v[1] - (-t).exp()).abs() < 1e-6);
        }
        // Nodes are reproduced exactly.
        assert_eq!(s.eval(2.0)[0], 2f64.sin());
    }

    #[test]
    fn interpolant_is_exact_for_cubics() {
        let x = vec![0.0, 0.3, 1.0, 2.5, 2.7];
        let y: Vec<f64> = x.iter().map(|t| t * t * t - 3.0 * t - 1.0).collect();
        let s = CubicInterpolant::new(x, y, 1).unwrap();
        assert!((s.eval(1.7)[0] - (1.7f64.powi(3) - 6.1)).abs() < 1e-13);
        assert!((s.eval(0.1)[0] - (0.001 - 1.3)).abs() < 1e-13);
        assert!(CubicInterpolant::new(vec![0.0, 0.0, 1.0, 2.0], vec![1.0; 4], 1).is_err());
    }

    #[test]
    fn spectral_table_round_trip_and_refinement() {
        let grid: Vec<f64> = (0..129).map(|i| i as f64 / 64.0).collect();
        let f = |w: f64| -> Result<(CMat3, f64)> {
            let mut m = CMat3::zeros();
            m[(0, 0)] = Complex64::new(w.cos(), 0.0);
            m[(0, 2)] = Complex64::new(0.0, -w * w);
            m[(2, 0)] = Complex64::new(0.0, w * w);
            Ok((m, 1e-15))
        };
        let t = SpectralTable::build(grid, 0.1, f).unwrap();
        let m = t.eval(0.77);
        assert!((m[(0, 0)].re - 0.77f64.cos()).abs() < 1e-8);
        assert!((m[(2, 0)].im - 0.77 * 0.77).abs() < 1e-10);
        assert!(t.refinement_error < 1e-6 && t.refinement_error > 0.0);
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 130);
        assert!(text.starts_with("omega,v,re_xx,im_xx"));
    }
}
