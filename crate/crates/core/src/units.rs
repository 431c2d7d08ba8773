//! Physical parameters and the dimensionless internal unit system.
//!
//! Internally ħ = ε₀ = 1, lengths are measured in the atom–surface distance
//! z_a and frequencies in the surface-plasmon frequency ω_sp = ω_p/√2. The
//! static polarizability enters only through α̃₀ = α₀/(ε₀ z_a³). Conversion to
//! and from SI happens at the boundary through [`Scales`].

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Above this α̃₀ the weak-coupling reading of the results is questionable.
pub const WEAK_COUPLING_WARN: f64 = 0.1;

/// Drude metal in internal frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub omega_p: f64,
    pub gamma_m: f64,
}

impl MaterialParams {
    pub fn new(omega_p: f64, gamma_m: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return Err(Error::validation("omega_p", format!("must be positive, got {omega_p}")));
        }
        if !(gamma_m > 0.0 && gamma_m.is_finite()) {
            return Err(Error::validation("gamma_m", format!("must be positive, got {gamma_m}")));
        }
        Ok(MaterialParams { omega_p, gamma_m })
    }

    /// Material with ω_sp = 1, i.e. already in internal units.
    pub fn internal(gamma_m: f64) -> Result<Self> {
        Self::new(std::f64::consts::SQRT_2, gamma_m)
    }

    pub fn omega_sp(&self) -> f64 {
        omega_sp(self)
    }

    /// ρ = Γ/(ε₀ ω_p²).
    pub fn resistivity(&self) -> f64 {
        self.gamma_m / (self.omega_p * self.omega_p)
    }
}

/// Surface plasmon-polariton frequency ω_p/√2.
pub fn omega_sp(m: &MaterialParams) -> f64 {
    m.omega_p / std::f64::consts::SQRT_2
}

/// Numerical knobs shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsConfig {
    /// Relative tolerance of the innermost (wavevector) quadratures.
    pub rel_tol_quad: f64,
    /// Wavevector cutoff in units of 1/(2 z_a).
    pub q_cutoff: f64,
    /// Frequency cutoff in units of ω_sp (lower bound of the integration range).
    pub omega_cutoff: f64,
    /// Node count of cached spectral tables.
    pub grid_size: usize,
    /// Relative eigenvalue tolerance for semidefiniteness checks.
    pub psd_tol: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            rel_tol_quad: 1e-10,
            q_cutoff: 40.0,
            omega_cutoff: 10.0,
            grid_size: 1025,
            psd_tol: 1e-10,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("numerics.rel_tol_quad", self.rel_tol_quad),
            ("numerics.q_cutoff", self.q_cutoff),
            ("numerics.omega_cutoff", self.omega_cutoff),
            ("numerics.psd_tol", self.psd_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::validation(name, format!("must be positive, got {value}")));
            }
        }
        if self.grid_size < 8 {
            return Err(Error::validation("numerics.grid_size", "must be at least 8"));
        }
        if self.q_cutoff < 10.0 {
            log::warn!("numerics.q_cutoff = {} is below the recommended minimum of 10", self.q_cutoff);
        }
        Ok(())
    }
}

/// Atom, geometry, motion and material in internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub omega_a: f64,
    /// Dimensionless coupling α̃₀ = α₀/(ε₀ z_a³).
    pub alpha0: f64,
    pub za: f64,
    /// Velocity along x; the sign is kept for parity checks.
    pub v: f64,
    pub material: MaterialParams,
    pub numerics: NumericsConfig,
}

impl Scenario {
    pub fn new(
        omega_a: f64,
        alpha0: f64,
        za: f64,
        v: f64,
        material: MaterialParams,
        numerics: NumericsConfig,
    ) -> Result<Self> {
        let s = Scenario {
            omega_a,
            alpha0,
            za,
            v,
            material,
            numerics,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("atom.omega_a", self.omega_a),
            ("atom.alpha0", self.alpha0),
            ("geometry.za", self.za),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::validation(name, format!("must be positive, got {value}")));
            }
        }
        if !self.v.is_finite() {
            return Err(Error::validation("motion.v", "must be finite"));
        }
        MaterialParams::new(self.material.omega_p, self.material.gamma_m)?;
        self.numerics.validate()?;
        if self.alpha0 > WEAK_COUPLING_WARN {
            log::warn!(
                "alpha0 = {:.3e} exceeds the weak-coupling threshold {WEAK_COUPLING_WARN}",
                self.alpha0
            );
        }
        Ok(())
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_alpha0(mut self, alpha0: f64) -> Self {
        self.alpha0 = alpha0;
        self
    }

    /// Wavevector cutoff q_cutoff/(2 z_a).
    pub fn q_max(&self) -> f64 {
        self.numerics.q_cutoff / (2.0 * self.za)
    }

    /// Bare polarizability at ω = 0 in internal units, α̃₀ z_a³.
    pub fn static_alpha(&self) -> f64 {
        self.alpha0 * self.za.powi(3)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "omega_a={:.10e} alpha0={:.10e} za={:.10e} v={:.10e} omega_p={:.10e} gamma_m={:.10e} \
             rel_tol_quad={:.3e} q_cutoff={} omega_cutoff={} grid_size={} psd_tol={:.3e}",
            self.omega_a,
            self.alpha0,
            self.za,
            self.v,
            self.material.omega_p,
            self.material.gamma_m,
            self.numerics.rel_tol_quad,
            self.numerics.q_cutoff,
            self.numerics.omega_cutoff,
            self.numerics.grid_size,
            self.numerics.psd_tol,
        )
    }
}

/// Parameter set in SI units, as read from a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiParams {
    /// Plasma frequency [rad/s].
    pub omega_p: f64,
    /// Drude damping [rad/s].
    pub gamma: f64,
    /// Dipole resonance [rad/s].
    pub omega_a: f64,
    /// Static polarizability [C m²/V].
    pub alpha0: f64,
    /// Atom–surface distance [m].
    pub za: f64,
    /// Velocity as a fraction of c.
    pub v_over_c: f64,
}

impl SiParams {
    /// Gold Drude parameters (ω_p = 9.0 eV, Γ = 35 meV), a 2.4e15 rad/s
    /// transition, α̃₀ = 1e-4 at z_a = 1 nm and v = 1e-4 c.
    pub fn gold_default() -> Self {
        SiParams {
            omega_p: 1.367_3e16,
            gamma: 5.317e13,
            omega_a: 2.4e15,
            alpha0: 1e-4 * EPSILON_0 * 1e-27,
            za: 1e-9,
            v_over_c: 1e-4,
        }
    }
}

/// Conversion factors between internal and SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    /// Length unit z_a [m].
    pub length: f64,
    /// Frequency unit ω_sp [rad/s].
    pub frequency: f64,
}

impl Scales {
    pub fn velocity(&self) -> f64 {
        self.length * self.frequency
    }
    /// Energy unit ħ ω_sp [J].
    pub fn energy(&self) -> f64 {
        HBAR * self.frequency
    }
    /// Power unit ħ ω_sp² [W].
    pub fn power(&self) -> f64 {
        HBAR * self.frequency * self.frequency
    }
    /// Force unit ħ ω_sp / z_a [N].
    pub fn force(&self) -> f64 {
        HBAR * self.frequency / self.length
    }
    /// Polarizability unit ε₀ z_a³ [C m²/V].
    pub fn polarizability(&self) -> f64 {
        EPSILON_0 * self.length.powi(3)
    }
}

/// Converts SI parameters to a dimensionless [`Scenario`] plus the scales
/// needed to convert back.
pub fn to_internal(si: &SiParams, numerics: NumericsConfig) -> Result<(Scenario, Scales)> {
    for (name, value) in [
        ("material.omega_p_si", si.omega_p),
        ("material.gamma_si", si.gamma),
        ("atom.omega_a_si", si.omega_a),
        ("atom.alpha0_si", si.alpha0),
        ("geometry.za_si", si.za),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::validation(name, format!("must be positive, got {value}")));
        }
    }
    if !si.v_over_c.is_finite() || si.v_over_c.abs() >= 1.0 {
        return Err(Error::validation(
            "motion.v_over_c",
            format!("|v/c| must be below 1 for the nonrelativistic model, got {}", si.v_over_c),
        ));
    }
    let scales = Scales {
        length: si.za,
        frequency: si.omega_p / std::f64::consts::SQRT_2,
    };
    let material = MaterialParams::new(
        si.omega_p / scales.frequency,
        si.gamma / scales.frequency,
    )?;
    let scenario = Scenario::new(
        si.omega_a / scales.frequency,
        si.alpha0 / scales.polarizability(),
        1.0,
        si.v_over_c * SPEED_OF_LIGHT / scales.velocity(),
        material,
        numerics,
    )?;
    Ok((scenario, scales))
}

/// Inverse of [`to_internal`].
pub fn to_si(scenario: &Scenario, scales: &Scales) -> SiParams {
    SiParams {
        omega_p: scenario.material.omega_p * scales.frequency,
        gamma: scenario.material.gamma_m * scales.frequency,
        omega_a: scenario.omega_a * scales.frequency,
        alpha0: scenario.alpha0 * scales.polarizability() * scenario.za.powi(3),
        za: scenario.za * scales.length,
        v_over_c: scenario.v * scales.velocity() / SPEED_OF_LIGHT,
    }
}
