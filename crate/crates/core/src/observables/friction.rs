//! Friction force and radiated power,
//!
//! ```text
//! F     = −2∫₀^∞dω ∫dq/2π q Tr[Sᵀ(qv − ω) G_Im(q, ω)]
//! P_rad =  2∫₀^∞dω ∫dq/2π ω Tr[Sᵀ(qv − ω) G_Im(q, ω)]
//! ```
//!
//! with G_Im(q, ω) = Im r(ω) M(q) and S = α ν_θ α† the one-sided dipole
//! spectrum. S vanishes below −|v| q_max, which confines ω to [0, 2|v| q_max];
//! it is tabulated once on [−|v| q_max, |v| q_max] and interpolated.

use crate::dyad::CMat3;
use crate::error::{Error, Result};
use crate::greens::dyad_parts;
use crate::kernels::kernels;
use crate::material::reflection;
use crate::polarizability::dress;
use crate::quadrature::{integrate, Domain, Each, Tolerance};
use crate::table::SpectralTable;
use crate::units::Scenario;

use super::plan::{doppler_edge, outer_tolerance};

/// Interpolation error of the S table accepted without refinement.
pub const TABLE_TOL: f64 = 1e-7;
const MAX_REFINEMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionReport {
    pub v: f64,
    pub f_fric: f64,
    pub p_rad: f64,
    /// Work per unit time done by the external agent, −v F.
    pub p_ext: f64,
    /// |P_rad − P_ext|/P_rad, zero when both vanish.
    pub residual: f64,
    pub err_f: f64,
    pub err_rad: f64,
    pub table_error: f64,
}

/// S(u, v) = α ν_θ α† with its error estimate.
pub fn one_sided_spectrum(u: f64, v: f64, s: &Scenario) -> Result<(CMat3, f64)> {
    let b = kernels(u, v, s)?;
    let alpha = dress(0.0, u, v, s, &b.delta)?;
    let sp = alpha.sandwich(&b.one_sided());
    let a = crate::dyad::entry_norm(&alpha.value);
    let err = a * a * (b.err_noise + b.err_dissipation);
    Ok((sp.into_matrix(), err))
}

/// S on `n` uniform nodes over the Doppler band (0 is always a node),
/// refined while the half-resolution check exceeds [`TABLE_TOL`].
pub fn spectrum_table(s: &Scenario, n: usize) -> Result<SpectralTable> {
    let edge = doppler_edge(s);
    if edge == 0.0 {
        return Err(Error::Domain {
            what: "spectrum table needs v ≠ 0",
            at: s.v,
        });
    }
    let mut half = (n.max(5) / 2).max(2);
    let mut table = build_table(s, edge, half)?;
    for _ in 0..MAX_REFINEMENTS {
        if table.refinement_error <= TABLE_TOL {
            break;
        }
        log::debug!(
            "S table with {} nodes: refinement error {:.2e}, refining",
            2 * half + 1,
            table.refinement_error
        );
        half *= 2;
        table = build_table(s, edge, half)?;
    }
    Ok(table)
}

fn build_table(s: &Scenario, edge: f64, half: usize) -> Result<SpectralTable> {
    let grid: Vec<f64> = (0..=2 * half)
        .map(|i| edge * (i as f64 - half as f64) / half as f64)
        .collect();
    SpectralTable::build(grid, s.v, |u| one_sided_spectrum(u, s.v, s))
}

/// Tr[Sᵀ M(q)] for M in the planar (xx, yy, zz, b) form.
fn trace_st_m(sp: &CMat3, p: &[f64; 4]) -> f64 {
    p[0] * sp[(0, 0)].re + p[1] * sp[(1, 1)].re + p[2] * sp[(2, 2)].re + 2.0 * p[3] * sp[(0, 2)].im
}

pub fn friction(s: &Scenario) -> Result<FrictionReport> {
    if s.v == 0.0 {
        return Ok(FrictionReport {
            v: 0.0,
            f_fric: 0.0,
            p_rad: 0.0,
            p_ext: 0.0,
            residual: 0.0,
            err_f: 0.0,
            err_rad: 0.0,
            table_error: 0.0,
        });
    }
    let table = spectrum_table(s, s.numerics.grid_size)?;
    friction_with_table(s, &table)
}

pub fn friction_with_table(s: &Scenario, table: &SpectralTable) -> Result<FrictionReport> {
    let v = s.v;
    let qmax = s.q_max();
    let edge = doppler_edge(s);
    let inner_tol = Tolerance::new(s.numerics.rel_tol_quad.max(1e-12));
    let mut failure = None;
    let outer = |omega: f64| -> Each<2> {
        if failure.is_some() {
            return Each([0.0; 2]);
        }
        // u = qv − ω ∈ [−edge, edge] and |q| ≤ q_max.
        let (qa, qb) = ((omega - edge) / v, (omega + edge) / v);
        let (lo, hi) = (qa.min(qb).max(-qmax), qa.max(qb).min(qmax));
        if lo >= hi {
            return Each([0.0; 2]);
        }
        let g = |q: f64| {
            let t = trace_st_m(&table.eval(q * v - omega), &dyad_parts(q, s.za));
            Each([q * t, t])
        };
        // The interpolant is smooth only between table nodes.
        let mut cuts: Vec<f64> = table.grid().iter().map(|&u| (u + omega) / v).collect();
        cuts.push(0.0);
        match integrate(g, Domain::finite(lo, hi), &cuts, inner_tol) {
            Ok(r) => {
                let im_r = reflection(&s.material, omega).im / std::f64::consts::PI;
                Each([-im_r * r.value.0[0], omega * im_r * r.value.0[1]])
            }
            Err(e) => {
                failure = Some(e);
                Each([0.0; 2])
            }
        }
    };
    let u = v.abs() / s.za;
    let cuts: Vec<f64> = (-6..=2).map(|k| u * 10f64.powi(k)).chain([edge]).collect();
    let res = integrate(outer, Domain::finite(0.0, 2.0 * edge), &cuts, outer_tolerance(s));
    if let Some(e) = failure {
        return Err(e);
    }
    let res = res?;
    let [f_fric, p_rad] = res.value.0;
    let [err_f, err_rad] = res.err_parts.0;
    let p_ext = -v * f_fric;
    Ok(FrictionReport {
        v,
        f_fric,
        p_rad,
        p_ext,
        residual: if p_rad == 0.0 { 0.0 } else { (p_rad - p_ext).abs() / p_rad },
        err_f,
        err_rad,
        table_error: table.refinement_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{MaterialParams, NumericsConfig};

    fn scenario(v: f64) -> Scenario {
        Scenario::new(
            0.25,
            1e-4,
            1.0,
            v,
            MaterialParams::internal(0.0055).unwrap(),
            NumericsConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn static_atom_feels_no_force() {
        let r = friction(&scenario(0.0)).unwrap();
        assert_eq!((r.f_fric, r.p_rad), (0.0, 0.0));
    }

    #[test]
    fn drag_balances_radiated_power() {
        let v = 3.1e-3;
        let r = friction(&scenario(v)).unwrap();
        eprintln!("{r:?}");
        assert!(r.f_fric < 0.0 && r.p_rad > 0.0);
        assert!(r.residual < 1e-3, "{r:?}");
        let m = friction(&scenario(-v)).unwrap();
        assert!((m.f_fric + r.f_fric).abs() <= 1e-6 * r.f_fric.abs());
    }
}
