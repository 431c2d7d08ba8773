//! The invariant suite behind `qfriction checks`.

use std::io::Write;
use std::time::Instant;

use qfriction::greens::geometric_dyad_fast;
use qfriction::kernels::{kernels, one_sided_kernel};
use qfriction::observables::{
    fdi_asymptote, fdi_ratio, friction, power_balance_with, spectral_energy, spectral_energy_lte, PowerOptions,
};
use qfriction::polarizability::alpha_dressed;
use qfriction::{HermitianDyad, Result, Scenario};

use crate::commands::{log_grid, lowest_frequency, Context};

/// Relative tolerance of the full-band power balance.
const BALANCE_TOL: f64 = 1e-4;
/// Error-budget multiple allowed for the Doppler-band balance.
const LOW_BAND_FACTOR: f64 = 10.0;
/// Relative tolerances of the FDI asymptotes.
const FDI_HIGH_TOL: f64 = 0.01;
const FDI_LOW_TOL: f64 = 0.05;
/// Stationarity residual |P_rad + vF|/P_rad.
const FRICTION_TOL: f64 = 1e-3;
/// Relative tolerance of parity checks.
const PARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Verdict { name, pass, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn power_checks(s: &Scenario, lte_substitute: bool, out: &mut Vec<Verdict>) -> Result<()> {
    let r = power_balance_with(s, PowerOptions { lte_substitute })?;
    let full = r.p_net.abs() / r.p_in;
    out.push(Verdict::new(
        "power balance",
        full <= BALANCE_TOL,
        format!("P_in={:.6e} P_out={:.6e} |P_in-P_out|/P_in={full:.3e} (limit {BALANCE_TOL:.0e})", r.p_in, r.p_out),
    ));
    let gap = r.p_in_low - r.p_out_low;
    let budget = LOW_BAND_FACTOR * r.err_low;
    out.push(Verdict::new(
        "doppler-band power balance",
        gap.abs() <= budget,
        format!(
            "P_in-P_out on [0, v q_max] = {gap:.6e} (limit {budget:.3e}); P_LTE={:.6e}",
            r.p_lte
        ),
    ));
    let floor = s.numerics.psd_tol * r.p_in;
    let lte_ok = if s.v == 0.0 {
        r.p_lte.abs() <= floor
    } else {
        r.p_lte > 0.0
    };
    out.push(Verdict::new(
        "LTE imbalance sign",
        lte_ok,
        format!(
            "P_LTE={:.6e} +- {:.1e}, small-v asymptote {:.6e} ({})",
            r.p_lte,
            r.err_lte,
            r.p_lte_asymptotic,
            if s.v == 0.0 { "must vanish" } else { "must be positive" }
        ),
    ));
    Ok(())
}

/// Smallest margin (min eigenvalue + tol·trace norm) and where it occurs.
struct Worst {
    margin: f64,
    min_eig: f64,
    at: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            margin: f64::INFINITY,
            min_eig: f64::INFINITY,
            at: f64::NAN,
        }
    }

    fn update(&mut self, d: &HermitianDyad, tol: f64, at: f64) {
        let m = d.psd_margin(tol);
        if m < self.margin {
            self.margin = m;
            self.min_eig = d.min_eigenvalue();
            self.at = at;
        }
    }

    fn verdict(&self, name: &'static str, var: &str) -> Verdict {
        Verdict::new(
            name,
            self.margin >= 0.0,
            format!("worst min eigenvalue {:.3e} at {var}={:.4e}", self.min_eig, self.at),
        )
    }
}

fn psd_checks(s: &Scenario, out: &mut Vec<Verdict>) -> Result<()> {
    let tol = s.numerics.psd_tol;
    let u = s.v.abs() / s.za;
    let hi = 4.0 * s.omega_a.max(s.material.omega_sp());
    let positive = log_grid(lowest_frequency(s), hi, 50);
    let mut nu_plus = Worst::new();
    let mut nu_minus = Worst::new();
    let mut sigma = Worst::new();
    let mut one_sided = Worst::new();
    let mut alpha_im = Worst::new();
    for w in positive.iter().flat_map(|&w| [w, -w]) {
        let b = kernels(w, s.v, s)?;
        // ν + D = ν_θ(ω) and ν − D = ν_θ(−ω)ᵀ, each integrated directly.
        let theta = one_sided_kernel(w, s.v, s)?.value;
        nu_plus.update(&theta, tol, w);
        nu_minus.update(&one_sided_kernel(-w, s.v, s)?.value.transpose(), tol, w);
        let a = alpha_dressed(w, s.v, s)?;
        sigma.update(&a.sandwich(&b.noise), tol, w);
        one_sided.update(&a.sandwich(&theta), tol, w);
        // The dissipation kernel is indefinite below the Doppler scale.
        if w >= 2.0 * u {
            alpha_im.update(&a.alpha_im_from(&b.dissipation), tol, w);
        }
    }
    out.push(nu_plus.verdict("PSD nu+D", "omega"));
    out.push(nu_minus.verdict("PSD nu-D", "omega"));
    out.push(sigma.verdict("PSD Sigma", "omega"));
    out.push(one_sided.verdict("PSD S", "omega"));
    out.push(alpha_im.verdict("PSD alpha_Im (omega >= 2v/za)", "omega"));
    let mut m = Worst::new();
    for q in log_grid(1e-3 / s.za, s.q_max(), 10).into_iter().flat_map(|q| [q, -q]) {
        m.update(&geometric_dyad_fast(q, s.za)?.value, tol, q);
    }
    out.push(m.verdict("PSD M(q)", "q"));
    Ok(())
}

fn fdi_checks(s: &Scenario, out: &mut Vec<Verdict>) -> Result<()> {
    if s.v == 0.0 {
        let f = fdi_ratio(s.omega_a, 0.0, s)?;
        out.push(Verdict::new(
            "FDI equilibrium",
            (f.ratio - 1.0).abs() <= FDI_HIGH_TOL,
            format!("Tr nu/|Tr D| = {:.8} at omega_a", f.ratio),
        ));
        return Ok(());
    }
    let u = s.v.abs() / s.za;
    let high = fdi_ratio(100.0 * u, s.v, s)?;
    let low = fdi_ratio(1e-3 * u, s.v, s)?;
    let low_asym = fdi_asymptote(low.omega, s.v, s.za);
    out.push(Verdict::new(
        "FDI high-frequency asymptote",
        (high.ratio - 1.0).abs() <= FDI_HIGH_TOL,
        format!("ratio {:.6} at omega=100 v/za (expected 1)", high.ratio),
    ));
    out.push(Verdict::new(
        "FDI low-frequency asymptote",
        rel(low.ratio, low_asym) <= FDI_LOW_TOL,
        format!("ratio {:.6e} at omega=1e-3 v/za (expected {low_asym:.6e})", low.ratio),
    ));
    Ok(())
}

fn friction_checks(s: &Scenario, out: &mut Vec<Verdict>) -> Result<()> {
    if s.v == 0.0 {
        out.push(Verdict::new("friction at rest", true, "F_fric = 0 by symmetry".into()));
        return Ok(());
    }
    let f = friction(s)?;
    out.push(Verdict::new(
        "stationarity P_rad = -v F",
        f.residual <= FRICTION_TOL,
        format!(
            "F={:.6e} P_rad={:.6e} residual {:.3e} (limit {FRICTION_TOL:.0e})",
            f.f_fric, f.p_rad, f.residual
        ),
    ));
    out.push(Verdict::new(
        "friction opposes motion",
        f.f_fric * s.v < 0.0,
        format!("F v = {:.6e}", f.f_fric * s.v),
    ));
    let g = friction(&s.with_v(-s.v))?;
    let odd = rel(f.f_fric, -g.f_fric);
    out.push(Verdict::new(
        "friction odd in v",
        odd <= PARITY_TOL.max(f.residual),
        format!("F(v)={:.6e} F(-v)={:.6e} relative mismatch {odd:.3e}", f.f_fric, g.f_fric),
    ));
    Ok(())
}

fn energy_checks(s: &Scenario, out: &mut Vec<Verdict>) -> Result<()> {
    let e0 = spectral_energy(0.0, s.v, s)?;
    let e0_lte = spectral_energy_lte(0.0, s.v, s)?;
    let scale = spectral_energy(s.omega_a, s.v, s)?;
    let floor = s.numerics.psd_tol * scale;
    let (ok, expect) = if s.v == 0.0 {
        (e0.abs() <= floor, "must vanish at rest")
    } else {
        (e0 > 0.0, "must be positive in motion")
    };
    out.push(Verdict::new(
        "zero-frequency spectral energy",
        ok,
        format!("E(0,v)={e0:.6e} ({expect})"),
    ));
    out.push(Verdict::new(
        "zero-frequency LTE spectral energy",
        e0_lte.abs() <= floor,
        format!("E_LTE(0,v)={e0_lte:.6e} (must vanish)"),
    ));
    let mut worst = 0.0f64;
    let mut negative = f64::INFINITY;
    for w in log_grid(lowest_frequency(s), 4.0 * s.omega_a, 12) {
        let a = spectral_energy(w, s.v, s)?;
        let b = spectral_energy(w, -s.v, s)?;
        worst = worst.max(rel(a, b));
        negative = negative.min(a);
    }
    let b0 = spectral_energy(0.0, -s.v, s)?;
    worst = worst.max(rel(e0, b0));
    out.push(Verdict::new(
        "spectral energy nonnegative",
        negative >= -floor,
        format!("min sampled E(omega,v)={negative:.6e}"),
    ));
    out.push(Verdict::new(
        "spectral energy even in v",
        worst <= PARITY_TOL,
        format!("max relative mismatch {worst:.3e}"),
    ));
    Ok(())
}

/// Runs every check, writes one line per verdict and returns the number of
/// failures.
pub fn run(ctx: &Context, w: &mut dyn Write) -> Result<usize> {
    let s = &ctx.scenario;
    let mut verdicts = Vec::new();
    type Group<'a> = &'a dyn Fn(&mut Vec<Verdict>) -> Result<()>;
    let groups: [(&str, Group); 5] = [
        ("power", &|o| power_checks(s, ctx.lte_substitute, o)),
        ("psd", &|o| psd_checks(s, o)),
        ("fdi", &|o| fdi_checks(s, o)),
        ("energy", &|o| energy_checks(s, o)),
        ("friction", &|o| friction_checks(s, o)),
    ];
    for (name, group) in groups {
        let start = Instant::now();
        group(&mut verdicts)?;
        log::info!("{name} checks done in {:.1} s", start.elapsed().as_secs_f64());
    }
    for line in ctx.meta("checks", &[]) {
        writeln!(w, "# {line}")?;
    }
    for v in &verdicts {
        writeln!(w, "{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail)?;
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    writeln!(w, "{} of {} checks passed", verdicts.len() - failed, verdicts.len())?;
    Ok(failed)
}
