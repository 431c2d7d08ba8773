//! `qfriction sweep`: scalar observables along one parameter axis.

use std::io::Write;

use qfriction::config::Config;
use qfriction::csv::{Cell, CsvWriter};
use qfriction::observables::{friction, power_balance_with, spectral_energy, total_energy, PowerOptions};
use qfriction::units::EPSILON_0;
use qfriction::{Error, Result, Scales, Scenario};
use rayon::prelude::*;

use crate::commands::{linear_grid, log_grid, Context};
use crate::{Axis, Failure, SweepArgs};

const COLUMNS: [&str; 22] = [
    "index",
    "axis_value",
    "status",
    "v",
    "alpha0",
    "za_si",
    "omega_a_si",
    "p_in",
    "p_out",
    "err_net",
    "p_lte",
    "err_lte",
    "p_lte_asym",
    "p_lte_si",
    "f_fric",
    "err_f",
    "p_rad",
    "residual",
    "f_fric_si",
    "energy_zero",
    "energy_total",
    "energy_total_err",
];

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::V => "v [c]",
        Axis::Alpha0 => "alpha0 [eps0 za^3]",
        Axis::Za => "za [m]",
        Axis::OmegaA => "omega_a [rad/s]",
    }
}

/// Configuration of one sweep point. The dimensionless coupling is converted
/// at the point's own distance, so an `alpha0` sweep holds z_a fixed and a
/// `za` sweep holds the SI polarizability fixed.
pub fn point_config(base: &Config, axis: Axis, x: f64) -> Config {
    let mut c = *base;
    match axis {
        Axis::V => c.si.v_over_c = x,
        Axis::Alpha0 => c.si.alpha0 = x * EPSILON_0 * c.si.za.powi(3),
        Axis::Za => c.si.za = x,
        Axis::OmegaA => c.si.omega_a = x,
    }
    c
}

pub fn axis_values(args: &SweepArgs) -> std::result::Result<Vec<f64>, Failure> {
    if args.points == 0 {
        return Err(Failure::Usage("--points must be at least 1".into()));
    }
    if !(args.from.is_finite() && args.to.is_finite()) {
        return Err(Failure::Usage("--from and --to must be finite".into()));
    }
    if args.log {
        if !(args.from > 0.0 && args.to > 0.0) {
            return Err(Failure::Usage("--log needs positive --from and --to".into()));
        }
        Ok(log_grid(args.from, args.to, args.points))
    } else {
        Ok(linear_grid(args.from, args.to, args.points))
    }
}

struct Row {
    scenario: Scenario,
    scales: Scales,
    values: [f64; 15],
}

fn evaluate(config: &Config, lte_substitute: bool) -> Result<Row> {
    let (s, scales) = config.resolve()?;
    let p = power_balance_with(&s, PowerOptions { lte_substitute })?;
    let f = friction(&s)?;
    let (total, total_err) = total_energy(&s)?;
    let values = [
        p.p_in,
        p.p_out,
        p.err_net,
        p.p_lte,
        p.err_lte,
        p.p_lte_asymptotic,
        p.p_lte * scales.power(),
        f.f_fric,
        f.err_f,
        f.p_rad,
        f.residual,
        f.f_fric * scales.force(),
        spectral_energy(0.0, s.v, &s)?,
        total,
        total_err,
    ];
    Ok(Row {
        scenario: s,
        scales,
        values,
    })
}

pub fn run(ctx: &Context, args: &SweepArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let xs = axis_values(args)?;
    let rows: Vec<Result<Row>> = xs
        .par_iter()
        .map(|&x| {
            let c = point_config(&ctx.config, args.axis, x);
            evaluate(&c, ctx.lte_substitute)
        })
        .collect();
    let meta = ctx.meta(
        "sweep",
        &[
            ("axis", axis_name(args.axis).to_string()),
            ("spacing", if args.log { "log" } else { "linear" }.to_string()),
        ],
    );
    let mut w = CsvWriter::new(out, &meta, &COLUMNS)?;
    let mut failed = 0;
    for (i, (x, row)) in xs.iter().zip(rows).enumerate() {
        let mut cells: Vec<Cell> = vec![Cell::Text(i.to_string()), Cell::Num(*x)];
        match row {
            Ok(r) => {
                let s = &r.scenario;
                cells.push(Cell::Text("ok".into()));
                cells.extend(
                    [
                        s.v,
                        s.alpha0,
                        s.za * r.scales.length,
                        s.omega_a * r.scales.frequency,
                    ]
                    .map(Cell::Num),
                );
                cells.extend(r.values.map(Cell::Num));
            }
            Err(e) => {
                failed += 1;
                log::warn!("sweep point {i} ({} = {x:e}) failed: {e}", axis_name(args.axis));
                cells.push(Cell::Text(status(&e)));
                cells.extend(std::iter::repeat_n(Cell::Num(f64::NAN), COLUMNS.len() - 3));
            }
        }
        w.row(&cells)?;
    }
    w.finish()?;
    if failed > 0 {
        log::warn!("{failed} of {} sweep points failed", xs.len());
    }
    Ok(())
}

fn status(e: &Error) -> String {
    let kind = if e.is_numerical() { "numerical" } else { "invalid" };
    format!("{kind}: {e}")
}
