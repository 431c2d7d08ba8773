//! `qfriction`: steady-state observables of an atom moving above a Drude
//! metal, written as CSV.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 invariant violation (`checks`).

mod checks;
mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfriction::config::Config;
use qfriction::Error;

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "QFRICTION_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "qfriction", version, about = "Nonequilibrium steady state of an atom moving above a metal surface")]
pub struct Cli {
    /// Configuration file (`key = value` lines); defaults to the gold scenario.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set motion.v_over_c=2e-4`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Use the local-equilibrium dipole spectrum in the outgoing power.
    #[arg(long, global = true, hide = true)]
    pub lte_substitute: bool,

    /// Also write the tabulated geometric dyad M(q) to this file.
    #[arg(long, value_name = "PATH", global = true)]
    pub dump_geometric_dyad: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral energy with its local-equilibrium and Born–Markov counterparts.
    Spectrum,
    /// Ratio Tr ν/|Tr D| and its asymptote on a frequency grid.
    Fdi,
    /// Power balance P_in, P_out and the LTE imbalance.
    Power,
    /// Friction force and radiated power.
    Friction,
    /// Run the invariant suite; exit 3 on any violation.
    Checks,
    /// Scalar observables along one parameter axis.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Velocity in units of c.
    V,
    /// Dimensionless polarizability α₀/(ε₀ z_a³).
    Alpha0,
    /// Atom–surface distance [m].
    Za,
    /// Atomic frequency [rad/s].
    OmegaA,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Logarithmic spacing; both ends must be positive.
    #[arg(long)]
    pub log: bool,
}

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    Library(Error),
    Usage(String),
    Violations(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Library(e) if e.is_numerical() => 2,
            Failure::Library(_) | Failure::Usage(_) => 1,
            Failure::Violations(_) => 3,
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for o in &cli.overrides {
        config.apply_override(o)?;
    }
    Ok(config)
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool may already exist when embedded in tests; keep it then.
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::debug!("worker pool already initialized");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_workers()?;
    let config = load_config(cli)?;
    let (scenario, scales) = config.resolve()?;
    scenario.validate()?;
    log::info!("resolved scenario: {scenario}");
    if let Some(path) = &cli.dump_geometric_dyad {
        commands::dump_geometric_dyad(&scenario, path)?;
    }
    let ctx = commands::Context {
        config,
        scenario,
        scales,
        lte_substitute: cli.lte_substitute,
    };
    let mut out = commands::open_output(cli.out.as_deref())?;
    match &cli.command {
        Command::Spectrum => commands::spectrum(&ctx, &mut out)?,
        Command::Fdi => commands::fdi(&ctx, &mut out)?,
        Command::Power => commands::power(&ctx, &mut out)?,
        Command::Friction => commands::friction(&ctx, &mut out)?,
        Command::Checks => {
            let failed = checks::run(&ctx, &mut out)?;
            if failed > 0 {
                return Err(Failure::Violations(failed));
            }
        }
        Command::Sweep(args) => sweep::run(&ctx, args, &mut out)?,
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Library(e) => eprintln!("error: {e}"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Violations(n) => eprintln!("error: {n} check(s) failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
