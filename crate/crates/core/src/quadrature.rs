//! Adaptive one-dimensional integration.
//!
//! A single globally adaptive Gauss–Kronrod (10/21) integrator serves scalar,
//! complex, vector and dyad-valued integrands. Vector-valued integrands share
//! one panel decision, so linear structure of the integrand (e.g. Hermiticity
//! of a dyad) is preserved exactly by the quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Panels whose error is below this multiple of ε·∫|f| are at roundoff level.
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

// Gauss weights for XGK[1], XGK[3], .., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

/// Values that can be integrated: a real vector space with a norm.
pub trait Quadrand: Clone {
    fn zero() -> Self;

    /// `self += w * other`
    fn add_scaled(&mut self, w: f64, other: &Self);

    /// Componentwise absolute difference, used as the per-panel error vector.
    fn abs_diff(&self, other: &Self) -> Self;

    fn norm(&self) -> f64;

    /// Number of independently toleranced groups of components.
    const GROUPS: usize = 1;

    /// Norm of one group; with a single group this is [`Quadrand::norm`].
    fn group_norm(&self, _group: usize) -> f64 {
        self.norm()
    }
}

/// Several dyads in the planar (xx, yy, zz, b) representation integrated
/// together; each dyad must meet the tolerance on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Groups<const G: usize>(pub [[f64; 4]; G]);

impl<const G: usize> Quadrand for Groups<G> {
    fn zero() -> Self {
        Groups([[0.0; 4]; G])
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            for k in 0..4 {
                a[k] += w * b[k];
            }
        }
    }
    fn abs_diff(&self, other: &Self) -> Self {
        let mut out = [[0.0; 4]; G];
        for ((o, a), b) in out.iter_mut().zip(&self.0).zip(&other.0) {
            for ((o, a), b) in o.iter_mut().zip(a).zip(b) {
                *o = (a - b).abs();
            }
        }
        Groups(out)
    }
    fn norm(&self) -> f64 {
        (0..G).map(|g| self.group_norm(g)).sum()
    }
    const GROUPS: usize = G;
    fn group_norm(&self, group: usize) -> f64 {
        self.0[group].iter().map(|x| x.abs()).sum()
    }
}

/// Scalars integrated together, each meeting the tolerance on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Each<const N: usize>(pub [f64; N]);

impl<const N: usize> Quadrand for Each<N> {
    fn zero() -> Self {
        Each([0.0; N])
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        self.0.add_scaled(w, &other.0);
    }
    fn abs_diff(&self, other: &Self) -> Self {
        Each(self.0.abs_diff(&other.0))
    }
    fn norm(&self) -> f64 {
        self.0.norm()
    }
    const GROUPS: usize = N;
    fn group_norm(&self, group: usize) -> f64 {
        self.0[group].abs()
    }
}

/// Worst group of `err` against the tolerance for `value`; groups whose error
/// is at roundoff level relative to `mag` (the integral of |f|) count as
/// converged. Converged when <= 1.
fn error_ratio<V: Quadrand>(err: &V, value: &V, mag: &V, tol: &Tolerance) -> f64 {
    (0..V::GROUPS)
        .map(|g| {
            let e = err.group_norm(g);
            if e <= ROUNDOFF * mag.group_norm(g) {
                0.0
            } else {
                e / tol.bound(value.group_norm(g))
            }
        })
        .fold(0.0, f64::max)
}

impl Quadrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        *self += w * other;
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Quadrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        *self += other * w;
    }
    fn abs_diff(&self, other: &Self) -> Self {
        Complex64::new((self.re - other.re).abs(), (self.im - other.im).abs())
    }
    fn norm(&self) -> f64 {
        self.re.abs() + self.im.abs()
    }
}

impl<const N: usize> Quadrand for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += w * b;
        }
    }
    fn abs_diff(&self, other: &Self) -> Self {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = (self[i] - other[i]).abs();
        }
        out
    }
    fn norm(&self) -> f64 {
        self.iter().map(|x| x.abs()).sum()
    }
}

/// Dyads share one panel decision; the norm (sum of absolute entries) bounds the trace.
impl Quadrand for Matrix3<Complex64> {
    fn zero() -> Self {
        Matrix3::zeros()
    }
    fn add_scaled(&mut self, w: f64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b * w;
        }
    }
    fn abs_diff(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| Complex64::new((a.re - b.re).abs(), (a.im - b.im).abs()))
    }
    fn norm(&self) -> f64 {
        self.iter().map(|z| z.re.abs() + z.im.abs()).sum()
    }
}

/// Requested accuracy: converged when `err <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 1e-300,
            max_panels: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    pub fn bound(&self, magnitude: f64) -> f64 {
        (self.rel * magnitude).max(self.abs)
    }
}

/// Integration domain together with the variable substitution used on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[a, b]`, no substitution.
    Finite { a: f64, b: f64 },
    /// `[a, b]` with `x = center + width * sinh(t)`; flattens a Lorentzian of
    /// half-width `width` together with its algebraic tails.
    Sinh {
        a: f64,
        b: f64,
        center: f64,
        width: f64,
    },
    /// `[a, inf)` with `x = a - scale * ln(1 - u)`, for exponentially decaying integrands.
    ExpTail { a: f64, scale: f64 },
    /// `[a, inf)` with `x = a + scale * u / (1 - u)`, for power-law tails.
    RationalTail { a: f64, scale: f64 },
}

impl Domain {
    pub fn finite(a: f64, b: f64) -> Self {
        Domain::Finite { a, b }
    }

    fn param_range(&self) -> (f64, f64) {
        match *self {
            Domain::Finite { a, b } => (a, b),
            Domain::Sinh {
                a,
                b,
                center,
                width,
            } => (((a - center) / width).asinh(), ((b - center) / width).asinh()),
            Domain::ExpTail { .. } | Domain::RationalTail { .. } => (0.0, 1.0),
        }
    }

    /// Maps the parameter to `(x, dx/dt)`.
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Domain::Finite { .. } => (t, 1.0),
            Domain::Sinh { center, width, .. } => (center + width * t.sinh(), width * t.cosh()),
            Domain::ExpTail { a, scale } => {
                let s = 1.0 - t;
                (a - scale * s.ln(), scale / s)
            }
            Domain::RationalTail { a, scale } => {
                let s = 1.0 - t;
                (a + scale * t / s, scale / (s * s))
            }
        }
    }

    fn inverse(&self, x: f64) -> f64 {
        match *self {
            Domain::Finite { .. } => x,
            Domain::Sinh { center, width, .. } => ((x - center) / width).asinh(),
            Domain::ExpTail { a, scale } => 1.0 - (-(x - a) / scale).exp(),
            Domain::RationalTail { a, scale } => {
                let y = (x - a) / scale;
                y / (1.0 + y)
            }
        }
    }

    fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Finite { a, b } | Domain::Sinh { a, b, .. } => {
                x > a.min(b) && x < a.max(b)
            }
            Domain::ExpTail { a, .. } | Domain::RationalTail { a, .. } => x > a,
        }
    }
}

/// Result of an integration: value, absolute error estimate, panel count.
#[derive(Debug, Clone)]
pub struct IntegrationResult<V> {
    pub value: V,
    pub err: f64,
    /// Componentwise error estimate.
    pub err_parts: V,
    pub panels: usize,
    pub converged: bool,
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: V,
    mag: V,
    key: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn gauss_kronrod<V: Quadrand, F: FnMut(f64) -> V>(
    f: &mut F,
    domain: &Domain,
    a: f64,
    b: f64,
) -> (V, V, V) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = V::zero();
    let mut mag = V::zero();
    let mut eval = |t: f64| {
        let (x, jac) = domain.map(t);
        let mut y = V::zero();
        y.add_scaled(jac, &f(x));
        y
    };
    let fc = eval(center);
    let mut kronrod = V::zero();
    let mut gauss = V::zero();
    kronrod.add_scaled(WGK[10], &fc);
    mag.add_scaled(WGK[10], &fc.abs_diff(&zero));
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        mag.add_scaled(WGK[j], &f1.abs_diff(&zero));
        mag.add_scaled(WGK[j], &f2.abs_diff(&zero));
        kronrod.add_scaled(WGK[j], &f1);
        kronrod.add_scaled(WGK[j], &f2);
        if j % 2 == 1 {
            gauss.add_scaled(WG[j / 2], &f1);
            gauss.add_scaled(WG[j / 2], &f2);
        }
    }
    let mut value = V::zero();
    value.add_scaled(half, &kronrod);
    let mut g = V::zero();
    g.add_scaled(half, &gauss);
    let err = value.abs_diff(&g);
    let mut m = V::zero();
    m.add_scaled(half.abs(), &mag);
    (value, err, m)
}

/// Integrates `f` over `domain`, splitting first at every breakpoint that lies
/// inside the domain. Panels are bisected in order of decreasing error until
/// the total error meets `tol` or `tol.max_panels` is reached.
pub fn integrate_best_effort<V, F>(
    mut f: F,
    domain: Domain,
    breakpoints: &[f64],
    tol: Tolerance,
) -> IntegrationResult<V>
where
    V: Quadrand,
    F: FnMut(f64) -> V,
{
    let (t0, t1) = domain.param_range();
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .filter(|x| domain.contains(**x))
        .map(|&x| domain.inverse(x))
        .filter(|t| t.is_finite() && *t > t0.min(t1) && *t < t0.max(t1))
        .collect();
    cuts.push(t0);
    cuts.push(t1);
    cuts.sort_by(f64::total_cmp);
    if t1 < t0 {
        cuts.reverse();
    }
    cuts.dedup();

    let mut total = V::zero();
    let mut total_err = V::zero();
    let mut total_mag = V::zero();
    let mut initial = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (value, err, mag) = gauss_kronrod(&mut f, &domain, w[0], w[1]);
        total.add_scaled(1.0, &value);
        total_err.add_scaled(1.0, &err);
        total_mag.add_scaled(1.0, &mag);
        initial.push((w[0], w[1], value, err, mag));
    }
    let mut heap = BinaryHeap::new();
    for (a, b, value, err, mag) in initial {
        let key = error_ratio(&err, &total, &mag, &tol);
        heap.push(Panel {
            a,
            b,
            value,
            err,
            mag,
            key,
        });
    }

    let done = |err: &V, total: &V, mag: &V| error_ratio(err, total, mag, &tol) <= 1.0;
    let mut converged = done(&total_err, &total, &total_mag);
    while !converged && heap.len() < tol.max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split any further in floating point.
            heap.push(Panel {
                key: 0.0,
                ..worst
            });
            break;
        }
        if worst.key == 0.0 {
            // Every remaining panel is at roundoff level.
            heap.push(worst);
            break;
        }
        let (lv, le, lm) = gauss_kronrod(&mut f, &domain, worst.a, mid);
        let (rv, re, rm) = gauss_kronrod(&mut f, &domain, mid, worst.b);
        total_mag.add_scaled(1.0, &lm);
        total_mag.add_scaled(1.0, &rm);
        total_mag.add_scaled(-1.0, &worst.mag);
        total.add_scaled(-1.0, &worst.value);
        total.add_scaled(1.0, &lv);
        total.add_scaled(1.0, &rv);
        total_err.add_scaled(-1.0, &worst.err);
        total_err.add_scaled(1.0, &le);
        total_err.add_scaled(1.0, &re);
        for (a, b, value, err, mag) in [(worst.a, mid, lv, le, lm), (mid, worst.b, rv, re, rm)] {
            let key = error_ratio(&err, &total, &mag, &tol);
            heap.push(Panel {
                a,
                b,
                value,
                err,
                mag,
                key,
            });
        }
        converged = done(&total_err, &total, &total_mag);
    }

    // Re-sum to shed the drift of the incremental updates.
    let panels = heap.len();
    let mut value = V::zero();
    let mut err = V::zero();
    let mut mag = V::zero();
    for p in heap.into_vec() {
        value.add_scaled(1.0, &p.value);
        err.add_scaled(1.0, &p.err);
        mag.add_scaled(1.0, &p.mag);
    }
    let converged = converged || done(&err, &value, &mag);
    IntegrationResult {
        err: err.norm(),
        err_parts: err,
        value,
        panels,
        converged,
    }
}

/// Like [`integrate_best_effort`] but non-convergence is an error carrying the
/// best estimate and its error bound.
pub fn integrate<V, F>(
    f: F,
    domain: Domain,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<IntegrationResult<V>>
where
    V: Quadrand,
    F: FnMut(f64) -> V,
{
    let res = integrate_best_effort(f, domain, breakpoints, tol);
    if res.converged && res.err.is_finite() && res.value.norm().is_finite() {
        Ok(res)
    } else {
        Err(Error::NonConvergence {
            estimate: res.value.norm(),
            err: res.err,
            panels: res.panels,
        })
    }
}
