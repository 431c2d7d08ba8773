//! Frequency plans for integrals over ω ≥ 0.
//!
//! The half line is cut at the scales of the problem (Doppler band edges,
//! the plasmon, the atomic line) and every piece gets its own substitution.
//! All pieces are chained into one parameter u ∈ [0, K], piece k on
//! [k, k + 1], so a single adaptive pass controls the error of the total.
//!
//! The atomic line is far narrower than ulp(ω_a) at weak coupling, so
//! integrands receive ω as `center + offset`: inside the atomic piece
//! `center` is ω_a exactly and `offset` resolves the dressed poles.

use crate::error::{Error, Result};
use crate::polarizability::{dressed_poles, DressedPole};
use crate::quadrature::{integrate, Domain, IntegrationResult, Quadrand, Tolerance};
use crate::units::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    /// offset = a + (b − a) t
    Linear { a: f64, b: f64 },
    /// offset = c + w sinh(t0 + (t1 − t0) t)
    Sinh { c: f64, w: f64, t0: f64, t1: f64 },
    /// offset = a + scale · t/(1 − t)
    Tail { a: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    center: f64,
    map: Map,
}

impl Piece {
    fn sinh(center: f64, a: f64, b: f64, c: f64, w: f64) -> Self {
        Piece {
            center,
            map: Map::Sinh {
                c,
                w,
                t0: ((a - c) / w).asinh(),
                t1: ((b - c) / w).asinh(),
            },
        }
    }

    /// (offset, jacobian) at t ∈ (0, 1).
    fn eval(&self, t: f64) -> (f64, f64) {
        match self.map {
            Map::Linear { a, b } => (a + (b - a) * t, b - a),
            Map::Sinh { c, w, t0, t1 } => {
                let tau = t0 + (t1 - t0) * t;
                (c + w * tau.sinh(), (t1 - t0) * w * tau.cosh())
            }
            Map::Tail { a, scale } => {
                let s = 1.0 - t;
                (a + scale * t / s, scale / (s * s))
            }
        }
    }
}

/// A partition of [0, hi] (or of the whole half line) into mapped pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pieces: Vec<Piece>,
}

/// Upper end of the finite part of every plan.
pub fn omega_max(s: &Scenario) -> f64 {
    (10.0 * s.omega_a)
        .max(s.numerics.omega_cutoff * s.material.omega_sp())
        .max(1e3 * s.v.abs() / s.za)
}

/// Edge of the Doppler band, |v| q_max: beyond it no wavevector reverses the
/// sign of ω + qv.
pub fn doppler_edge(s: &Scenario) -> f64 {
    s.v.abs() * s.q_max()
}

fn scale_points(s: &Scenario) -> Vec<f64> {
    let wsp = s.material.omega_sp();
    let edge = doppler_edge(s);
    let mut p = vec![wsp, omega_max(s)];
    if s.v != 0.0 {
        let u = s.v.abs() / s.za;
        p.extend((-6..=2).map(|k| u * 10f64.powi(k)));
        p.extend([edge, 2.0 * edge, wsp - edge, wsp + edge]);
    }
    p
}

/// Poles closer than twice their widths are treated as one.
fn merge_poles(poles: &[DressedPole]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = poles
        .iter()
        .map(|p| (p.center_offset(), p.width().max(f64::MIN_POSITIVE)))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (c, w) in sorted {
        match out.last_mut() {
            Some(last) if c - last.0 < 2.0 * last.1.max(w) => {
                last.0 = 0.5 * (last.0 + c);
                last.1 = last.1.max(w);
            }
            _ => out.push((c, w)),
        }
    }
    out
}

impl Plan {
    /// Plan over [0, hi]; `hi = ∞` appends a power-law tail beyond
    /// [`omega_max`]. Dressed poles are computed if the atomic line lies in range.
    pub fn new(s: &Scenario, hi: f64) -> Result<Plan> {
        let poles = if s.omega_a < hi.min(omega_max(s)) {
            dressed_poles(s)?
        } else {
            Vec::new()
        };
        Self::with_poles(s, hi, &poles)
    }

    pub fn with_poles(s: &Scenario, hi: f64, poles: &[DressedPole]) -> Result<Plan> {
        if !(hi > 0.0) {
            return Err(Error::validation("plan", format!("upper limit must be positive, got {hi}")));
        }
        let wmax = omega_max(s);
        let end = hi.min(wmax);
        let wa = s.omega_a;
        let wsp = s.material.omega_sp();
        let mut cuts: Vec<f64> = scale_points(s)
            .into_iter()
            .filter(|&x| x > 0.0 && x < end && x != wa)
            .collect();
        cuts.push(0.0);
        cuts.push(end);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a < wa && wa < b && !poles.is_empty() {
                pieces.extend(atomic_pieces(wa, a - wa, b - wa, &merge_poles(poles)));
            } else if a == wsp || b == wsp {
                pieces.push(Piece::sinh(0.0, a, b, wsp, 0.5 * s.material.gamma_m));
            } else {
                pieces.push(Piece {
                    center: 0.0,
                    map: Map::Linear { a, b },
                });
            }
        }
        if hi.is_infinite() {
            pieces.push(Piece {
                center: 0.0,
                map: Map::Tail { a: wmax, scale: wmax },
            });
        }
        Ok(Plan { pieces })
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Integrates `f(center, offset)` over the plan.
    pub fn integrate<V, F>(&self, tol: Tolerance, mut f: F) -> Result<IntegrationResult<V>>
    where
        V: Quadrand,
        F: FnMut(f64, f64) -> Result<V>,
    {
        let k = self.pieces.len();
        let mut failure: Option<Error> = None;
        let g = |u: f64| {
            if failure.is_some() {
                return V::zero();
            }
            let i = (u.floor() as usize).min(k - 1);
            let piece = &self.pieces[i];
            let (offset, jac) = piece.eval(u - i as f64);
            match f(piece.center, offset) {
                Ok(v) => {
                    let mut out = V::zero();
                    out.add_scaled(jac, &v);
                    out
                }
                Err(e) => {
                    failure = Some(e);
                    V::zero()
                }
            }
        };
        let cuts: Vec<f64> = (1..k).map(|i| i as f64).collect();
        let res = integrate(g, Domain::finite(0.0, k as f64), &cuts, tol);
        if let Some(e) = failure {
            return Err(e);
        }
        res
    }
}

/// Pieces of [center + lo, center + hi] around the merged poles (offset, width).
fn atomic_pieces(center: f64, lo: f64, hi: f64, poles: &[(f64, f64)]) -> Vec<Piece> {
    let inside: Vec<(f64, f64)> = poles.iter().copied().filter(|p| p.0 > lo && p.0 < hi).collect();
    if inside.is_empty() {
        return vec![Piece {
            center,
            map: Map::Linear { a: lo, b: hi },
        }];
    }
    let mut out = Vec::new();
    let (c0, w0) = inside[0];
    out.push(Piece::sinh(center, lo, c0, c0, w0));
    for pair in inside.windows(2) {
        let ((c1, w1), (c2, w2)) = (pair[0], pair[1]);
        let mid = c1 + 0.5 * (c2 - c1);
        out.push(Piece::sinh(center, c1, mid, c1, w1));
        out.push(Piece::sinh(center, mid, c2, c2, w2));
    }
    let (cn, wn) = inside[inside.len() - 1];
    out.push(Piece::sinh(center, cn, hi, cn, wn));
    out
}

/// Outer tolerance for frequency integrals of kernel-valued integrands; looser
/// than the inner wavevector tolerance so inner noise does not stall it.
pub fn outer_tolerance(s: &Scenario) -> Tolerance {
    Tolerance::new((100.0 * s.numerics.rel_tol_quad).clamp(1e-12, 1e-3)).with_max_panels(20_000)
}
