//! The single-scenario commands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qfriction::config::Config;
use qfriction::csv::{metadata, CsvWriter};
use qfriction::greens::GeometricDyadTable;
use qfriction::observables::{
    energy_report, fdi_ratio, friction as friction_report, power_balance_with, PowerOptions,
};
use qfriction::{Error, Result, Scales, Scenario};

pub struct Context {
    pub config: Config,
    pub scenario: Scenario,
    pub scales: Scales,
    pub lte_substitute: bool,
}

impl Context {
    pub fn meta(&self, command: &str, extra: &[(&str, String)]) -> Vec<String> {
        let mut all = vec![
            ("command", command.to_string()),
            ("frequency unit [rad/s]", format!("{:.10e}", self.scales.frequency)),
            ("length unit [m]", format!("{:.10e}", self.scales.length)),
            ("power unit [W]", format!("{:.10e}", self.scales.power())),
            ("force unit [N]", format!("{:.10e}", self.scales.force())),
        ];
        if self.lte_substitute {
            all.push(("lte substitute", "true".to_string()));
        }
        all.extend(extra.iter().cloned());
        metadata(&self.scenario, &all)
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Lower end of sampled frequency grids: well below both the Doppler scale
/// v/z_a and the atomic resonance.
pub fn lowest_frequency(s: &Scenario) -> f64 {
    let u = s.v.abs() / s.za;
    1e-3 * if u > 0.0 { u.min(s.omega_a) } else { s.omega_a }
}

/// ω = 0 followed by a log grid from well below the Doppler scale to above
/// the plasmon.
pub fn spectrum_grid(s: &Scenario) -> Vec<f64> {
    let lo = lowest_frequency(s);
    let hi = 2.0 * s.omega_a.max(s.material.omega_sp());
    let mut g = vec![0.0];
    g.extend(log_grid(lo, hi, s.numerics.grid_size.max(2) - 1));
    g
}

pub fn spectrum(ctx: &Context, out: &mut dyn Write) -> Result<()> {
    let s = &ctx.scenario;
    let report = energy_report(s, &spectrum_grid(s))?;
    let meta = ctx.meta(
        "spectrum",
        &[
            ("total energy [hbar omega_sp]", format!("{:.10e} +- {:.2e}", report.total, report.total_err)),
            ("zero-frequency spectral energy", format!("{:.10e}", report.zero_frequency)),
        ],
    );
    let mut w = CsvWriter::new(out, &meta, &["omega", "omega_si", "energy", "energy_lte", "energy_bm"])?;
    for p in &report.samples {
        w.numbers(&[p.omega, p.omega * ctx.scales.frequency, p.energy, p.energy_lte, p.energy_bm])?;
    }
    w.finish()?;
    Ok(())
}

pub fn fdi(ctx: &Context, out: &mut dyn Write) -> Result<()> {
    let s = &ctx.scenario;
    let u = s.v.abs() / s.za;
    let grid = if u > 0.0 {
        log_grid(1e-4 * u, 1e3 * u, s.numerics.grid_size.max(2))
    } else {
        log_grid(1e-4, 10.0, s.numerics.grid_size.max(2))
    };
    let mut w = CsvWriter::new(out, &ctx.meta("fdi", &[]), &["omega", "ratio", "asymptote", "err"])?;
    for omega in grid {
        let f = fdi_ratio(omega, s.v, s)?;
        w.numbers(&[f.omega, f.ratio, f.asymptote, f.err])?;
    }
    w.finish()?;
    Ok(())
}

pub fn power(ctx: &Context, out: &mut dyn Write) -> Result<()> {
    let s = &ctx.scenario;
    let r = power_balance_with(
        s,
        PowerOptions {
            lte_substitute: ctx.lte_substitute,
        },
    )?;
    let mut w = CsvWriter::new(
        out,
        &ctx.meta("power", &[]),
        &[
            "v", "p_in", "p_out", "p_net", "p_lte", "p_lte_asym", "err_in", "err_out", "err_lte", "p_in_low",
            "p_out_low", "err_low", "p_lte_si",
        ],
    )?;
    w.numbers(&[
        r.v,
        r.p_in,
        r.p_out,
        r.p_net,
        r.p_lte,
        r.p_lte_asymptotic,
        r.err_in,
        r.err_out,
        r.err_lte,
        r.p_in_low,
        r.p_out_low,
        r.err_low,
        r.p_lte * ctx.scales.power(),
    ])?;
    w.finish()?;
    Ok(())
}

pub fn friction(ctx: &Context, out: &mut dyn Write) -> Result<()> {
    let r = friction_report(&ctx.scenario)?;
    let mut w = CsvWriter::new(
        out,
        &ctx.meta("friction", &[]),
        &["v", "f_fric", "p_rad", "p_ext", "residual", "err_f", "err_rad", "table_error", "f_fric_si"],
    )?;
    w.numbers(&[
        r.v,
        r.f_fric,
        r.p_rad,
        r.p_ext,
        r.residual,
        r.err_f,
        r.err_rad,
        r.table_error,
        r.f_fric * ctx.scales.force(),
    ])?;
    w.finish()?;
    Ok(())
}

pub fn dump_geometric_dyad(s: &Scenario, path: &Path) -> Result<()> {
    let table = GeometricDyadTable::build(s.za, s.q_max(), s.numerics.grid_size.max(4))?;
    let mut f = BufWriter::new(File::create(path)?);
    table.write_csv(&mut f)?;
    f.flush().map_err(Error::from)
}
