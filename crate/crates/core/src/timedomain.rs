//! Time-domain Langevin simulation of the moving dipole, an independent
//! check of the frequency-domain spectra.
//!
//! ```text
//! d̈ + ω_a² d = α₀ω_a² [∫₀^∞ Δ(τ) d(t − τ) dτ + ξ(t)]
//! Δ(τ) = r(τ) M̂(vτ),  r(τ) = ω_sp² e^{−Γτ/2} sin(Ωτ)/Ω,  Ω² = ω_sp² − Γ²/4
//! ```
//!
//! M̂ is the real-space image dyad and ξ a stationary Gaussian process with
//! spectrum ν(ω, v). The symmetric-ordered correlators are treated as
//! classical second moments. Spectra follow S(ω) = ∫dτ e^{iωτ}⟨x(t+τ) x(t)ᵀ⟩,
//! the convention in which Δ(ω) = ∫dτ e^{iωτ} Δ(τ) and Σ = α ν α†.
//!
//! The dipole starts at rest; the first `burn_in` steps are discarded. The
//! burn-in length is a choice, not derived: it must exceed the slowest
//! relaxation time 1/min|Im ω_k|.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::dyad::{CMat3, HermitianDyad};
use crate::error::{Error, Result};
use crate::greens::geometric_dyad_real_space;
use crate::kernels::noise_kernel;
use crate::polarizability::sigma_spectrum;
use crate::table::SpectralTable;
use crate::units::{MaterialParams, Scenario};

/// Oscillator energy beyond which a run is declared unstable.
const ENERGY_BOUND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub n_realizations: usize,
    pub seed: u64,
    /// Memory kernel is cut where its envelope falls below this fraction.
    pub memory_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            dt: 0.04,
            n_steps: 32768,
            burn_in: 6000,
            n_realizations: 200,
            seed: 1,
            memory_tol: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self, s: &Scenario) -> Result<()> {
        let limit = 0.05 / s.omega_a.max(s.material.omega_sp());
        if !(self.dt > 0.0 && self.dt < limit) {
            return Err(Error::validation("dt", format!("need 0 < dt < {limit:.4}, got {}", self.dt)));
        }
        if self.n_steps < 64 || !self.n_steps.is_multiple_of(2) {
            return Err(Error::validation("n_steps", "must be even and at least 64"));
        }
        if self.burn_in + 64 > self.n_steps {
            return Err(Error::validation("burn_in", "leaves fewer than 64 recorded steps"));
        }
        if self.n_realizations < 2 {
            return Err(Error::validation("n_realizations", "need at least two for error bars"));
        }
        if !(self.memory_tol > 0.0 && self.memory_tol < 1.0) {
            return Err(Error::validation("memory_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn recorded(&self) -> usize {
        self.n_steps - self.burn_in
    }
}

/// r(t) for t ≥ 0, the impulse response whose transform is the reflection
/// coefficient r(ω) = ω_sp²/(ω_sp² − ω² − iΓω).
pub fn reflection_response(m: &MaterialParams, t: f64) -> f64 {
    let wsp = m.omega_sp();
    let half = 0.5 * m.gamma_m;
    let omega2 = wsp * wsp - half * half;
    let wsp2 = wsp * wsp;
    if omega2 > 0.0 {
        let w = omega2.sqrt();
        wsp2 * (-half * t).exp() * (w * t).sin() / w
    } else if omega2 < 0.0 {
        // e^{−Γt/2} sinh(κt)/κ without overflow.
        let k = (-omega2).sqrt();
        wsp2 * ((-(half - k) * t).exp() - (-(half + k) * t).exp()) / (2.0 * k)
    } else {
        wsp2 * (-half * t).exp() * t
    }
}

/// dt·Δ(m dt) for m = 1..len, stored as (xx, yy, zz, xz, zx); Δ(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    pub dt: f64,
    weights: Vec<[f64; 5]>,
}

impl MemoryKernel {
    pub fn new(s: &Scenario, dt: f64, tol: f64) -> Self {
        let m = &s.material;
        let half = 0.5 * m.gamma_m;
        let omega2 = m.omega_sp().powi(2) - half * half;
        let rate = if omega2 < 0.0 { half - (-omega2).sqrt() } else { half };
        let t_max = (1.0 / tol).ln() / rate;
        let len = (t_max / dt).ceil() as usize;
        let weights = (1..=len)
            .map(|k| {
                let t = k as f64 * dt;
                let g = geometric_dyad_real_space(s.v * t, s.za) * (dt * reflection_response(m, t));
                [g[(0, 0)], g[(1, 1)], g[(2, 2)], g[(0, 2)], g[(2, 0)]]
            })
            .collect();
        MemoryKernel { dt, weights }
    }

    /// No memory at all: the free oscillator.
    pub fn none(dt: f64) -> Self {
        MemoryKernel {
            dt,
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Discrete transform Σ_m dt Δ(m dt) e^{iω m dt}, the level shift the
    /// simulation actually realizes.
    pub fn transform(&self, omega: f64) -> CMat3 {
        let mut out = CMat3::zeros();
        for (k, w) in self.weights.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, omega * (k + 1) as f64 * self.dt);
            out[(0, 0)] += ph * w[0];
            out[(1, 1)] += ph * w[1];
            out[(2, 2)] += ph * w[2];
            out[(0, 2)] += ph * w[3];
            out[(2, 0)] += ph * w[4];
        }
        out
    }

    /// Σ_{m≥1} dt Δ(m dt) d_{n−m} from the stored history d[..n].
    fn field(&self, history: &[[f64; 3]], n: usize) -> [f64; 3] {
        let mut e = [0.0; 3];
        for (k, w) in self.weights.iter().enumerate().take(n) {
            let d = &history[n - 1 - k];
            e[0] += w[0] * d[0] + w[3] * d[2];
            e[1] += w[1] * d[1];
            e[2] += w[2] * d[2] + w[4] * d[0];
        }
        e
    }
}

fn fft_frequencies(n: usize, dt: f64) -> Vec<f64> {
    (0..=n / 2).map(|k| 2.0 * PI * k as f64 / (n as f64 * dt)).collect()
}

/// Spectral factors L_k (L L† = ν) on the FFT frequencies of an n-step record.
#[derive(Debug, Clone)]
pub struct NoiseSynthesizer {
    n: usize,
    dt: f64,
    factors: Vec<CMat3>,
    /// ν(ω_k, v) at the nonnegative FFT frequencies.
    pub table: SpectralTable,
}

impl NoiseSynthesizer {
    pub fn new(s: &Scenario, n: usize, dt: f64) -> Result<Self> {
        let freqs = fft_frequencies(n, dt);
        let samples = freqs
            .par_iter()
            .map(|&w| {
                let k = noise_kernel(w, s.v, s)?;
                Ok((k.value.into_matrix(), k.err))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(s.numerics.psd_tol, n, dt, freqs, samples, s.v)
    }

    /// A synthesizer with a prescribed spectrum at the FFT frequencies.
    pub fn from_spectrum<F: Fn(f64) -> CMat3>(psd_tol: f64, n: usize, dt: f64, v: f64, spectrum: F) -> Result<Self> {
        let freqs = fft_frequencies(n, dt);
        let samples = freqs.iter().map(|&w| (spectrum(w), 0.0)).collect();
        Self::from_samples(psd_tol, n, dt, freqs, samples, v)
    }

    fn from_samples(
        psd_tol: f64,
        n: usize,
        dt: f64,
        freqs: Vec<f64>,
        samples: Vec<(CMat3, f64)>,
        v: f64,
    ) -> Result<Self> {
        let factors = samples
            .iter()
            .map(|(m, _)| HermitianDyad::hermitize(*m).sqrt_psd("noise spectrum", psd_tol))
            .collect::<Result<Vec<_>>>()?;
        let table = SpectralTable::from_samples(freqs, v, samples)?;
        Ok(NoiseSynthesizer { n, dt, factors, table })
    }

    /// One realization of ξ at t_j = j dt, j = 0..n, periodic in n dt.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
        let n = self.n;
        let mut spec = vec![[Complex64::new(0.0, 0.0); 3]; n];
        let mut normal = || -> f64 { StandardNormal.sample(rng) };
        for (k, l) in self.factors.iter().enumerate() {
            let edge = k == 0 || 2 * k == n;
            let z: [Complex64; 3] = std::array::from_fn(|_| {
                if edge {
                    Complex64::new(normal(), 0.0)
                } else {
                    Complex64::new(normal(), normal()) * std::f64::consts::FRAC_1_SQRT_2
                }
            });
            let x: [Complex64; 3] = std::array::from_fn(|i| (0..3).map(|j| l[(i, j)] * z[j]).sum());
            spec[k] = x;
            if !edge {
                spec[n - k] = x.map(|c| c.conj());
            }
        }
        // x_j = Σ_k x̂_k e^{−iω_k t_j}/(n dt), with x̂_k = sqrt(n dt) L_k z_k.
        let fft = FftPlanner::new().plan_fft_forward(n);
        let scale = 1.0 / (n as f64 * self.dt).sqrt();
        let mut out = vec![[0.0; 3]; n];
        for c in 0..3 {
            let mut buf: Vec<Complex64> = spec.iter().map(|x| x[c]).collect();
            fft.process(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                o[c] = b.re * scale;
            }
        }
        out
    }
}

/// Convenience: one noise record of `cfg.n_steps` samples.
pub fn synthesize_noise(s: &Scenario, cfg: &OracleConfig, seed: u64) -> Result<Vec<[f64; 3]>> {
    cfg.validate(s)?;
    let synth = NoiseSynthesizer::new(s, cfg.n_steps, cfg.dt)?;
    Ok(synth.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub d: Vec<[f64; 3]>,
    pub ddot: Vec<[f64; 3]>,
    /// ⟨ḋ·ξ⟩ over the recorded window: work done by the noise.
    pub p_in: f64,
    /// −⟨ḋ·E_mem⟩ over the recorded window: work done against the reaction field.
    pub p_out: f64,
    /// Largest oscillator energy (ḋ² + ω_a² d²)/(2α₀ω_a²) seen.
    pub max_energy: f64,
}

/// Kick–drift–kick with the harmonic part rotated exactly:
/// half kick by α₀ω_a²(E_mem + ξ), exact rotation at ω_a, half kick.
pub fn evolve_dipole(
    s: &Scenario,
    kernel: &MemoryKernel,
    noise: &[[f64; 3]],
    burn_in: usize,
    d0: [f64; 3],
    ddot0: [f64; 3],
) -> Result<Trajectory> {
    let n = noise.len();
    let dt = kernel.dt;
    let wa = s.omega_a;
    let coupling = s.static_alpha() * wa * wa;
    let (c, sn) = ((wa * dt).cos(), (wa * dt).sin());
    let energy = |d: &[f64; 3], p: &[f64; 3]| {
        (0..3).map(|i| p[i] * p[i] + wa * wa * d[i] * d[i]).sum::<f64>() / (2.0 * coupling)
    };

    let mut d = vec![[0.0; 3]; n];
    let mut ddot = vec![[0.0; 3]; n];
    d[0] = d0;
    ddot[0] = ddot0;
    let mut field = kernel.field(&d, 0);
    let (mut p_in, mut p_out) = (0.0, 0.0);
    let mut max_energy = energy(&d0, &ddot0);
    for step in 0..n.saturating_sub(1) {
        let mut x = d[step];
        let mut p = ddot[step];
        for i in 0..3 {
            p[i] += 0.5 * dt * coupling * (field[i] + noise[step][i]);
        }
        for i in 0..3 {
            let (xi, pi) = (x[i], p[i]);
            x[i] = xi * c + pi / wa * sn;
            p[i] = -xi * wa * sn + pi * c;
        }
        let next = step + 1;
        d[next] = x;
        field = kernel.field(&d, next);
        for i in 0..3 {
            p[i] += 0.5 * dt * coupling * (field[i] + noise[next][i]);
        }
        ddot[next] = p;
        let e = energy(&x, &p);
        if !(e.is_finite() && e < ENERGY_BOUND) {
            return Err(Error::Instability { step: next, energy: e });
        }
        max_energy = max_energy.max(e);
        if next >= burn_in {
            for i in 0..3 {
                p_in += p[i] * noise[next][i];
                p_out -= p[i] * field[i];
            }
        }
    }
    let recorded = n.saturating_sub(burn_in.max(1)).max(1) as f64;
    Ok(Trajectory {
        dt,
        d,
        ddot,
        p_in: p_in / recorded,
        p_out: p_out / recorded,
        max_energy,
    })
}

/// Spectrum estimate at ω_k = 2πk/(len dt), k = 0..=len/2:
/// S_k = dt |Σ_j w_j x_j e^{iω_k t_j}|²/Σ_j w_j², with a Hann taper `w` if
/// `taper` and w ≡ 1 otherwise.
pub fn periodogram(x: &[[f64; 3]], dt: f64, taper: bool) -> (Vec<f64>, Vec<CMat3>) {
    let len = x.len();
    let w: Vec<f64> = (0..len)
        .map(|j| {
            if taper {
                let s = (PI * (j as f64 + 0.5) / len as f64).sin();
                s * s
            } else {
                1.0
            }
        })
        .collect();
    let norm = dt / w.iter().map(|v| v * v).sum::<f64>();
    let ifft = FftPlanner::new().plan_fft_inverse(len);
    let comps: Vec<Vec<Complex64>> = (0..3)
        .map(|c| {
            let mut buf: Vec<Complex64> = x.iter().zip(&w).map(|(v, wj)| Complex64::new(v[c] * wj, 0.0)).collect();
            ifft.process(&mut buf);
            buf
        })
        .collect();
    let freqs = fft_frequencies(len, dt);
    let values = (0..freqs.len())
        .map(|k| Matrix3::from_fn(|i, j| comps[i][k] * comps[j][k].conj() * norm))
        .collect();
    (freqs, values)
}

/// `n` equal bins over [lo, hi].
pub fn uniform_bins(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let a = lo + (hi - lo) * i as f64 / n as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / n as f64;
            (a, b)
        })
        .collect()
}

fn in_bin(w: f64, bin: (f64, f64)) -> bool {
    w >= bin.0 && w < bin.1
}

/// Band averages of the trace of a spectrum over `bins`.
fn band_traces(freqs: &[f64], values: &[CMat3], bins: &[(f64, f64)]) -> Vec<f64> {
    bins.iter()
        .map(|&b| {
            let (sum, count) = freqs
                .iter()
                .zip(values)
                .filter(|(w, _)| in_bin(**w, b))
                .fold((0.0, 0usize), |(s, c), (_, m)| (s + m.trace().re, c + 1));
            if count == 0 {
                f64::NAN
            } else {
                sum / count as f64
            }
        })
        .collect()
}

/// Mean and standard error of a band estimate over realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinEstimate {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub sigma: f64,
}

fn mean_and_error(x: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = x.clone().count() as f64;
    let mean = x.clone().sum::<f64>() / n;
    let var = x.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-realization band estimates of the dipole and noise spectra and of
/// the two work rates. Individual trajectories are not retained.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub config: OracleConfig,
    pub bins: Vec<(f64, f64)>,
    /// [realization][bin] band-averaged Tr of the dipole spectrum.
    pub dipole_traces: Vec<Vec<f64>>,
    /// [realization][bin] band-averaged Tr of the noise spectrum.
    pub noise_traces: Vec<Vec<f64>>,
    pub p_in: Vec<f64>,
    pub p_out: Vec<f64>,
    pub memory_len: usize,
}

impl TrajectoryEnsemble {
    pub fn run(s: &Scenario, cfg: &OracleConfig, bins: &[(f64, f64)]) -> Result<Self> {
        cfg.validate(s)?;
        let kernel = MemoryKernel::new(s, cfg.dt, cfg.memory_tol);
        let synth = NoiseSynthesizer::new(s, cfg.n_steps, cfg.dt)?;
        Self::run_with(s, cfg, bins, &kernel, &synth)
    }

    pub fn run_with(
        s: &Scenario,
        cfg: &OracleConfig,
        bins: &[(f64, f64)],
        kernel: &MemoryKernel,
        synth: &NoiseSynthesizer,
    ) -> Result<Self> {
        let runs = (0..cfg.n_realizations)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                let noise = synth.sample(&mut rng);
                let traj = evolve_dipole(s, kernel, &noise, cfg.burn_in, [0.0; 3], [0.0; 3])?;
                let (fd, sd) = periodogram(&traj.d[cfg.burn_in..], cfg.dt, true);
                let (fx, sx) = periodogram(&noise, cfg.dt, false);
                Ok((band_traces(&fd, &sd, bins), band_traces(&fx, &sx, bins), traj.p_in, traj.p_out))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = TrajectoryEnsemble {
            config: *cfg,
            bins: bins.to_vec(),
            dipole_traces: Vec::with_capacity(runs.len()),
            noise_traces: Vec::with_capacity(runs.len()),
            p_in: Vec::with_capacity(runs.len()),
            p_out: Vec::with_capacity(runs.len()),
            memory_len: kernel.len(),
        };
        for (d, x, pi, po) in runs {
            out.dipole_traces.push(d);
            out.noise_traces.push(x);
            out.p_in.push(pi);
            out.p_out.push(po);
        }
        Ok(out)
    }

    fn estimates(&self, data: &[Vec<f64>]) -> Vec<BinEstimate> {
        self.bins
            .iter()
            .enumerate()
            .map(|(b, &(lo, hi))| {
                let (mean, sigma) = mean_and_error(data.iter().map(|r| r[b]));
                BinEstimate { lo, hi, mean, sigma }
            })
            .collect()
    }

    pub fn dipole_spectrum(&self) -> Vec<BinEstimate> {
        self.estimates(&self.dipole_traces)
    }

    pub fn noise_spectrum(&self) -> Vec<BinEstimate> {
        self.estimates(&self.noise_traces)
    }

    /// Frequencies of the dipole periodogram falling in bin `b`.
    pub fn dipole_frequencies(&self, b: usize) -> Vec<f64> {
        fft_frequencies(self.config.recorded(), self.config.dt)
            .into_iter()
            .filter(|&w| in_bin(w, self.bins[b]))
            .collect()
    }

    /// Frequencies of the noise periodogram falling in bin `b`.
    pub fn noise_frequencies(&self, b: usize) -> Vec<f64> {
        fft_frequencies(self.config.n_steps, self.config.dt)
            .into_iter()
            .filter(|&w| in_bin(w, self.bins[b]))
            .collect()
    }

    /// (mean, standard error) of P_in, P_out and P_in − P_out.
    pub fn power(&self) -> [(f64, f64); 3] {
        let diff: Vec<f64> = self.p_in.iter().zip(&self.p_out).map(|(a, b)| a - b).collect();
        [
            mean_and_error(self.p_in.iter().copied()),
            mean_and_error(self.p_out.iter().copied()),
            mean_and_error(diff.iter().copied()),
        ]
    }
}

/// Frequency-domain prediction for a bin: mean of Tr Σ(ω, v) over `freqs`.
pub fn predicted_dipole_trace(s: &Scenario, freqs: &[f64]) -> Result<f64> {
    let sum = freqs
        .par_iter()
        .map(|&w| Ok(sigma_spectrum(w, s.v, s)?.sigma.trace()))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    Ok(sum / freqs.len() as f64)
}

/// Frequency-domain prediction for a bin: mean of Tr ν(ω, v) over `freqs`.
pub fn predicted_noise_trace(s: &Scenario, freqs: &[f64]) -> Result<f64> {
    let sum = freqs
        .par_iter()
        .map(|&w| Ok(noise_kernel(w, s.v, s)?.value.trace()))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    Ok(sum / freqs.len() as f64)
}
