//! Acceptance criteria: one PASS/FAIL line per criterion, with the measured
//! quantities underneath. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use qfriction::config::Config;
use qfriction::greens::geometric_dyad_fast;
use qfriction::kernels::{kernels, one_sided_kernel};
use qfriction::observables::{
    bm_parameters, bm_spectral_energy, fdi_asymptote, fdi_ratio, friction, lte_asymptote, lte_power,
    power_balance, spectral_energy, spectral_energy_lte, total_energy,
};
use qfriction::polarizability::{alpha_dressed, sigma_spectrum};
use qfriction::timedomain::{predicted_dipole_trace, uniform_bins, OracleConfig, TrajectoryEnsemble};
use qfriction::units::EPSILON_0;
use qfriction::{HermitianDyad, MaterialParams, NumericsConfig, Result, Scales, Scenario};

/// Gold scenario at the given v/c and dimensionless coupling at 1 nm.
fn gold(v_over_c: f64, alpha0: f64) -> (Scenario, Scales) {
    let mut c = Config::default();
    c.si.v_over_c = v_over_c;
    c.si.alpha0 = alpha0 * EPSILON_0 * c.si.za.powi(3);
    c.resolve().expect("gold scenario")
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Least-squares slope of ln y against ln x.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("info {line}"));
    }
}

fn power_balance_criterion(o: &mut Outcome) -> Result<()> {
    for v_over_c in [0.0, 1e-5, 1e-4] {
        for alpha0 in [1e-6, 1e-4] {
            let (s, _) = gold(v_over_c, alpha0);
            let r = power_balance(&s)?;
            let d = r.p_net.abs() / r.p_in;
            o.check(
                d <= 1e-4,
                format!("v={v_over_c:.0e}c alpha0={alpha0:.0e}: P_in={:.6e} P_out={:.6e} rel diff {d:.2e} <= 1e-4", r.p_in, r.p_out),
            );
        }
    }
    Ok(())
}

fn lte_criterion(o: &mut Outcome) -> Result<()> {
    let (base, _) = gold(1e-4, 1e-4);
    let vs = [1e-5, 3e-5, 1e-4];
    let mut p = Vec::new();
    for &v in vs.iter().rev() {
        let s = base.with_v(v);
        let (lte, err) = lte_power(&s)?;
        let ratio = lte / lte_asymptote(&s);
        o.check(lte > 0.0, format!("v={v:.0e} z_a w_sp: P_LTE={lte:.6e} +- {err:.1e} > 0"));
        o.check(
            (ratio - 1.0).abs() <= 0.1,
            format!("v={v:.0e} z_a w_sp: P_LTE / asymptote = {ratio:.8} within 10%"),
        );
        p.push((v, lte));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = p.into_iter().unzip();
    let sv = log_slope(&x, &y);
    o.check((sv - 4.0).abs() <= 0.1, format!("slope in v = {sv:.5} (4 +- 0.1)"));

    let alphas = [1e-6, 1e-5, 1e-4];
    let y: Vec<f64> = alphas
        .iter()
        .map(|&a| lte_power(&base.with_v(1e-5).with_alpha0(a)).map(|r| r.0))
        .collect::<Result<_>>()?;
    let sa = log_slope(&alphas, &y);
    o.check((sa - 2.0).abs() <= 0.05, format!("slope in alpha0 = {sa:.5} (2 +- 0.05)"));

    // SI: fixed v/c and fixed SI polarizability, varying distance.
    let zs = [1e-9, 1.5e-9, 2e-9];
    let mut y = Vec::new();
    for &z in &zs {
        let mut c = Config::default();
        c.si.v_over_c = 1e-5;
        c.si.za = z;
        let (s, scales) = c.resolve()?;
        y.push(lte_power(&s)?.0 * scales.power());
    }
    let two_z: Vec<f64> = zs.iter().map(|z| 2.0 * z).collect();
    let sz = log_slope(&two_z, &y);
    o.check((sz + 10.0).abs() <= 0.2, format!("slope in 2 z_a = {sz:.5} (-10 +- 0.2)"));
    Ok(())
}

fn fdi_criterion(o: &mut Outcome) -> Result<()> {
    let (s, _) = gold(1e-4, 1e-4);
    let u = s.v / s.za;
    for k in [100.0, 300.0, 1e3] {
        let f = fdi_ratio(k * u, s.v, &s)?;
        o.check(
            (f.ratio - 1.0).abs() <= 0.01,
            format!("omega={k:.0e} v/z_a: ratio {:.8} = 1 within 1%", f.ratio),
        );
    }
    for k in [1e-3, 1e-4, 1e-5] {
        let f = fdi_ratio(k * u, s.v, &s)?;
        let want = fdi_asymptote(f.omega, s.v, s.za);
        o.check(
            rel(f.ratio, want) <= 0.05,
            format!("omega={k:.0e} v/z_a: ratio {:.6e} vs 3v/(pi z_a omega) = {want:.6e}, rel {:.2e} <= 5%", f.ratio, rel(f.ratio, want)),
        );
    }
    Ok(())
}

fn equilibrium_energy_criterion(o: &mut Outcome) -> Result<()> {
    let (s, _) = gold(0.0, 1e-6);
    let (e, err) = total_energy(&s)?;
    let want = 1.5 * s.omega_a;
    o.check(
        rel(e, want) <= 1e-3,
        format!("E = {e:.10e} +- {err:.1e} vs 1.5 omega_a = {want:.10e}, rel {:.2e} <= 1e-3", rel(e, want)),
    );
    let e0 = spectral_energy(0.0, 0.0, &s)?;
    o.check(e0.abs() <= 1e-12 * e, format!("E(0,0) = {e0:.3e}"));
    let (gamma, d2) = bm_parameters(&s)?;
    for g in [gamma, 1e-6, 1e-2, 1.0] {
        let bm = bm_spectral_energy(0.0, g, d2, &s)?;
        o.check(bm > 0.0, format!("E_BM(0,0) = {bm:.6e} > 0 at gamma_a = {g:.3e}"));
    }
    Ok(())
}

struct Worst {
    what: &'static str,
    margin: f64,
    min_eig: f64,
    trace: f64,
    at: (f64, f64),
    count: usize,
}

impl Worst {
    fn new(what: &'static str) -> Self {
        Worst {
            what,
            margin: f64::INFINITY,
            min_eig: 0.0,
            trace: 0.0,
            at: (f64::NAN, f64::NAN),
            count: 0,
        }
    }

    fn add(&mut self, d: &HermitianDyad, x: f64, y: f64) {
        self.count += 1;
        let m = d.psd_margin(1e-10);
        if m < self.margin {
            self.margin = m;
            self.min_eig = d.min_eigenvalue();
            self.trace = d.eigenvalues().iter().map(|e| e.abs()).sum();
            self.at = (x, y);
        }
    }

    fn report(&self, o: &mut Outcome, vars: (&str, &str)) {
        o.check(
            self.margin >= 0.0,
            format!(
                "{}: worst min eigenvalue {:.3e} vs -1e-10 x trace norm {:.3e} at {}={:.3e} {}={:.3e} ({} samples)",
                self.what, self.min_eig, self.trace, vars.0, self.at.0, vars.1, self.at.1, self.count
            ),
        );
    }
}

fn psd_criterion(o: &mut Outcome) -> Result<()> {
    let (base, _) = gold(1e-4, 1e-4);
    let v_max = base.v;
    let omegas = log_grid(1e-4, 4.0, 50);
    let velocities = [0.0, 1e-3 * v_max, 0.1 * v_max, v_max, -v_max];
    let mut plus = Worst::new("nu + D");
    let mut minus = Worst::new("nu - D");
    let mut sigma = Worst::new("Sigma");
    let mut one_sided = Worst::new("S");
    let mut alpha_im = Worst::new("alpha_Im (omega >= 0)");
    let mut alpha_im_high = Worst::new("alpha_Im (omega >= 2|v|/z_a)");
    for &v in &velocities {
        for w in omegas.iter().flat_map(|&w| [w, -w]) {
            let b = kernels(w, v, &base)?;
            let a = alpha_dressed(w, v, &base)?;
            // ν + D = ν_θ(ω) and ν − D = ν_θ(−ω)ᵀ, each integrated directly.
            let theta = one_sided_kernel(w, v, &base)?.value;
            plus.add(&theta, w, v);
            minus.add(&one_sided_kernel(-w, v, &base)?.value.transpose(), w, v);
            sigma.add(&a.sandwich(&b.noise), w, v);
            one_sided.add(&a.sandwich(&theta), w, v);
            if w >= 0.0 {
                let ai = a.alpha_im_from(&b.dissipation);
                alpha_im.add(&ai, w, v);
                if w >= 2.0 * v.abs() / base.za {
                    alpha_im_high.add(&ai, w, v);
                }
            }
        }
    }
    for w in [&plus, &minus, &sigma, &one_sided, &alpha_im] {
        w.report(o, ("omega", "v"));
    }
    let mut m = Worst::new("M(q)");
    for q in log_grid(1e-3, base.q_max(), 10).into_iter().flat_map(|q| [q, -q]) {
        m.add(&geometric_dyad_fast(q, base.za)?.value, q, base.za);
    }
    m.report(o, ("q", "z_a"));
    o.note(format!(
        "alpha_Im restricted to omega >= 2|v|/z_a: worst min eigenvalue {:.3e}, margin {:.3e} ({} samples)",
        alpha_im_high.min_eig, alpha_im_high.margin, alpha_im_high.count
    ));
    Ok(())
}

fn friction_criterion(o: &mut Outcome) -> Result<()> {
    let (s, _) = gold(1e-4, 1e-4);
    let f = friction(&s)?;
    o.check(
        f.residual <= 1e-3,
        format!("|P_rad + v F|/P_rad = {:.3e} <= 1e-3 (F={:.6e}, P_rad={:.6e})", f.residual, f.f_fric, f.p_rad),
    );
    o.check(f.f_fric * s.v < 0.0, format!("F v = {:.6e} < 0", f.f_fric * s.v));
    let g = friction(&s.with_v(-s.v))?;
    o.check(
        rel(f.f_fric, -g.f_fric) <= 1e-6,
        format!("F(-v) = {:.6e} = -F(v), rel {:.2e}", g.f_fric, rel(f.f_fric, -g.f_fric)),
    );
    Ok(())
}

fn low_frequency_criterion(o: &mut Outcome) -> Result<()> {
    let (base, _) = gold(1e-4, 1e-4);
    for v in [1e-2 * base.v, 0.1 * base.v, base.v] {
        let a = spectral_energy(0.0, v, &base)?;
        let b = spectral_energy(0.0, -v, &base)?;
        o.check(a > 0.0, format!("E(0,v) = {a:.6e} > 0 at v = {v:.3e}"));
        o.check(rel(a, b) <= 1e-9, format!("E(0,-v) = {b:.6e}, rel {:.2e}", rel(a, b)));
    }
    let alphas = [1e-6, 1e-5, 1e-4];
    let e: Vec<f64> = alphas
        .iter()
        .map(|&a| spectral_energy(0.0, base.v, &base.with_alpha0(a)))
        .collect::<Result<_>>()?;
    let slope = log_slope(&alphas, &e);
    o.check(
        (slope - 2.0).abs() <= 0.05,
        format!("slope of E(0,v) in alpha0 = {slope:.5} (2 +- 0.05)"),
    );
    let sig: Vec<f64> = alphas
        .iter()
        .map(|&a| sigma_spectrum(0.0, base.v, &base.with_alpha0(a)).map(|p| p.sigma.trace()))
        .collect::<Result<_>>()?;
    o.note(format!("slope of Tr Sigma(0,v) in alpha0 = {:.5}", log_slope(&alphas, &sig)));
    for v in [0.0, 1e-2 * base.v, base.v, -base.v] {
        let lte = spectral_energy_lte(0.0, v, &base)?;
        o.check(lte == 0.0, format!("E_LTE(0,v) = {lte:.3e} at v = {v:.3e}"));
    }
    Ok(())
}

fn time_domain_criterion(o: &mut Outcome) -> Result<()> {
    let (gold_s, _) = gold(1e-4, 1e-4);
    let material = MaterialParams::internal(1.0)?;
    let cfg = OracleConfig::default();
    let bins = uniform_bins(0.05, 1.6, 30);
    for v in [0.0, gold_s.v] {
        let s = Scenario::new(0.8, 16.0, 1.0, v, material, NumericsConfig::default())?;
        let start = Instant::now();
        let e = TrajectoryEnsemble::run(&s, &cfg, &bins)?;
        let mut worst_z: f64 = 0.0;
        let mut worst_rel: f64 = 0.0;
        for (b, est) in e.dipole_spectrum().iter().enumerate() {
            let want = predicted_dipole_trace(&s, &e.dipole_frequencies(b))?;
            worst_z = worst_z.max(((est.mean - want) / est.sigma).abs());
            worst_rel = worst_rel.max(rel(est.mean, want));
        }
        let label = format!(
            "v={v:.3e}: {} realizations x {} steps, {} bins ({:.1} s)",
            cfg.n_realizations,
            cfg.n_steps,
            bins.len(),
            start.elapsed().as_secs_f64()
        );
        if v == 0.0 {
            o.check(worst_z <= 3.0, format!("{label}: worst |z| = {worst_z:.2} <= 3"));
        } else {
            o.check(
                worst_rel <= 0.1,
                format!("{label}: worst relative deviation of Tr Sigma {worst_rel:.4} <= 0.1 (worst |z| {worst_z:.2})"),
            );
        }
    }
    Ok(())
}

type Criterion = fn(&mut Outcome) -> Result<()>;

fn main() {
    let criteria: [(&str, Criterion, u64); 8] = [
        ("power balance", power_balance_criterion, 120),
        ("LTE imbalance sign and scaling", lte_criterion, 300),
        ("FDI asymptotes", fdi_criterion, 60),
        ("equilibrium energy", equilibrium_energy_criterion, 60),
        ("PSD suite", psd_criterion, 60),
        ("stationarity identity", friction_criterion, 600),
        ("nonequilibrium low-frequency signature", low_frequency_criterion, 120),
        ("time-domain oracle", time_domain_criterion, 300),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = Outcome::new();
        if let Err(e) = run(&mut o) {
            o.check(false, format!("error: {e}"));
        }
        let elapsed = start.elapsed();
        o.check(
            elapsed <= Duration::from_secs(*budget),
            format!("runtime {:.1} s <= {budget} s", elapsed.as_secs_f64()),
        );
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {}: {name}", if o.pass { "PASS" } else { "FAIL" }, k + 1);
        for line in &o.lines {
            println!("    {line}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
