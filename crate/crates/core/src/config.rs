//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! material.omega_p_si = 1.3673e16   # trailing comments are allowed
//! motion.v_over_c     = 1e-4
//! ```
//!
//! Keys are case-sensitive. Unknown keys and keys given twice are errors;
//! missing keys keep their defaults ([`SiParams::gold_default`] and
//! [`NumericsConfig::default`]).

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{to_internal, NumericsConfig, Scales, Scenario, SiParams};

pub const KEYS: [&str; 11] = [
    "material.omega_p_si",
    "material.gamma_si",
    "atom.omega_a_si",
    "atom.alpha0_si",
    "geometry.za_si",
    "motion.v_over_c",
    "numerics.rel_tol_quad",
    "numerics.q_cutoff",
    "numerics.omega_cutoff",
    "numerics.grid_size",
    "numerics.psd_tol",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub si: SiParams,
    pub numerics: NumericsConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            si: SiParams::gold_default(),
            numerics: NumericsConfig::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Config::default();
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = split_assignment(content).map_err(|reason| Error::Config { line, reason })?;
            if !seen.insert(key.to_string()) {
                return Err(Error::Config {
                    line,
                    reason: format!("duplicate key `{key}`"),
                });
            }
            config.set(key, value).map_err(|reason| Error::Config { line, reason })?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies a `key=value` override, as given on a command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = split_assignment(assignment).map_err(|reason| Error::Config { line: 0, reason })?;
        self.set(key, value).map_err(|reason| Error::Config { line: 0, reason })
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if key == "numerics.grid_size" {
            self.numerics.grid_size = value
                .parse()
                .map_err(|_| format!("`{key}` expects a positive integer, got `{value}`"))?;
            return Ok(());
        }
        let x: f64 = value
            .parse()
            .map_err(|_| format!("`{key}` expects a number, got `{value}`"))?;
        let slot = match key {
            "material.omega_p_si" => &mut self.si.omega_p,
            "material.gamma_si" => &mut self.si.gamma,
            "atom.omega_a_si" => &mut self.si.omega_a,
            "atom.alpha0_si" => &mut self.si.alpha0,
            "geometry.za_si" => &mut self.si.za,
            "motion.v_over_c" => &mut self.si.v_over_c,
            "numerics.rel_tol_quad" => &mut self.numerics.rel_tol_quad,
            "numerics.q_cutoff" => &mut self.numerics.q_cutoff,
            "numerics.omega_cutoff" => &mut self.numerics.omega_cutoff,
            "numerics.psd_tol" => &mut self.numerics.psd_tol,
            _ => return Err(format!("unknown key `{key}`")),
        };
        *slot = x;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "material.omega_p_si" => self.si.omega_p,
            "material.gamma_si" => self.si.gamma,
            "atom.omega_a_si" => self.si.omega_a,
            "atom.alpha0_si" => self.si.alpha0,
            "geometry.za_si" => self.si.za,
            "motion.v_over_c" => self.si.v_over_c,
            "numerics.rel_tol_quad" => self.numerics.rel_tol_quad,
            "numerics.q_cutoff" => self.numerics.q_cutoff,
            "numerics.omega_cutoff" => self.numerics.omega_cutoff,
            "numerics.grid_size" => self.numerics.grid_size as f64,
            "numerics.psd_tol" => self.numerics.psd_tol,
            _ => return None,
        })
    }

    /// Validates and converts to internal units.
    pub fn resolve(&self) -> Result<(Scenario, Scales)> {
        to_internal(&self.si, self.numerics)
    }

    /// Canonical text form; parses back to the same configuration.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .map(|&k| match k {
                "numerics.grid_size" => format!("{k} = {}\n", self.numerics.grid_size),
                _ => format!("{k} = {:e}\n", self.get(k).unwrap_or(f64::NAN)),
            })
            .collect()
    }
}

fn split_assignment(s: &str) -> std::result::Result<(&str, &str), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `key = value`, got `{s}`"))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || value.is_empty() {
        return Err(format!("expected `key = value`, got `{s}`"));
    }
    Ok((key, value))
}
