//! Fundamental solution, Riemann function and the Cauchy kernels.
//!
//! With `A = e^t`, `B = e^{t0}` and `r = |x - x0|` the propagator is
//!
//! ```text
//! E = F(1/2,1/2;1;ζ) / sqrt((A+B)² - r²),   ζ = ((A-B)² - r²) / ((A+B)² - r²),
//! ```
//!
//! supported in the cone `r <= |A - B|`. `ζ` and `1 - ζ = 4AB/((A+B)² - r²)`
//! are formed separately so neither loses digits to cancellation.
//!
//! `K1(z,t) = E(z,t;0,0)` and `K0(z,t) = -∂_{t0}E(z,t;0,t0)` at `t0 = 0`. The
//! closed form of `K0` is a difference of two hypergeometric terms divided by
//! `(e^t-1)² - z²`; it is evaluated here through `G(ζ) = (F₋ - F₊)/ζ`,
//!
//! ```text
//! K0 = [F₋(ζ) + 2(e^t - 1) G(ζ) / P] / (2 sqrt(P)),   P = (e^t+1)² - z²,
//! ```
//!
//! which is free of cancellation and bounded up to `z = e^t - 1`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::special::{hyp_pair, hyp_pair_log, HyperArg};
use crate::{Error, Result};

/// `1 - ζ` below which the logarithmic expansion is used.
pub const LOCUS_SWITCH: f64 = 1e-4;
/// `ζ` below which a point counts as near the light cone.
pub const CONE_SWITCH: f64 = 1e-4;
/// Terms of the logarithmic expansion near the singular locus.
pub const LOCUS_TERMS: usize = 8;

/// Observation point `(x, t)` and source point `(x0, t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeQuery {
    pub x: f64,
    pub t: f64,
    pub x0: f64,
    pub t0: f64,
}

impl ConeQuery {
    pub fn new(x: f64, t: f64, x0: f64, t0: f64) -> Self {
        Self { x, t, x0, t0 }
    }

    /// Query for a radial distance `r` from a source at `(0, t0)`.
    pub fn radial(r: f64, t: f64, t0: f64) -> Self {
        Self { x: r, t, x0: 0.0, t0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    Forward,
    Backward,
    Boundary,
    Outside,
}

/// Position of `(x, t)` relative to the light cones of `(x0, t0)`.
pub fn classify_cone(q: &ConeQuery) -> Cone {
    let (a, b) = (q.t.exp(), q.t0.exp());
    let r = (q.x - q.x0).abs();
    let reach = (a - b).abs();
    if !(r.is_finite() && reach.is_finite()) {
        return Cone::Outside;
    }
    if (reach - r).abs() <= 1e-14 * (a + b) {
        return Cone::Boundary;
    }
    if r < reach {
        if q.t > q.t0 {
            Cone::Forward
        } else {
            Cone::Backward
        }
    } else {
        Cone::Outside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Interior,
    NearLightCone,
    NearSingularLocus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub regime: Regime,
    pub est_err: f64,
}

fn regime(zeta: f64, zc: f64) -> Regime {
    if zc < LOCUS_SWITCH {
        Regime::NearSingularLocus
    } else if zeta < CONE_SWITCH {
        Regime::NearLightCone
    } else {
        Regime::Interior
    }
}

/// Characteristic coordinates `l = x + e^t`, `m = x - e^t` of an observation
/// point, and `(a, b)` of a source point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoords {
    pub l: f64,
    pub m: f64,
    pub a: f64,
    pub b_char: f64,
}

impl CharCoords {
    pub fn new(l: f64, m: f64, a: f64, b_char: f64) -> Self {
        Self { l, m, a, b_char }
    }

    pub fn from_spacetime(x: f64, t: f64, x0: f64, t0: f64) -> Self {
        let (et, e0) = (t.exp(), t0.exp());
        Self { l: x + et, m: x - et, a: x0 + e0, b_char: x0 - e0 }
    }

    /// `(x, t)` of the observation point.
    pub fn point(&self) -> (f64, f64) {
        (0.5 * (self.l + self.m), (0.5 * (self.l - self.m)).ln())
    }

    /// `(x0, t0)` of the source point.
    pub fn source(&self) -> (f64, f64) {
        (0.5 * (self.a + self.b_char), (0.5 * (self.a - self.b_char)).ln())
    }
}

/// `F(1/2,1/2;1;ζ)` with the near-locus switch; returns the truncation tail.
fn plus_routed(zeta: f64, zc: f64) -> (f64, f64) {
    if zc < LOCUS_SWITCH {
        let (p, _, tail) = hyp_pair_log(HyperArg::with_complement(zeta, zc), LOCUS_TERMS);
        (p, tail)
    } else {
        (hyp_pair(HyperArg::with_complement(zeta, zc)).0, 0.0)
    }
}

/// `G(ζ) = (F(-1/2,1/2;1;ζ) - F(1/2,1/2;1;ζ)) / ζ` by its power series, `ζ <= 1/2`.
fn g_series(zeta: f64) -> f64 {
    let mut c = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let r = (kf - 0.5) / kf;
        c *= r * r;
        let term = -kf / (kf - 0.5) * c * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        power *= zeta;
    }
    sum
}

/// Kernels at a fixed observation time `t > 0`, for use inside integrands.
///
/// The methods assume their arguments lie in the closed cone (clamping tiny
/// excursions caused by rounding) and skip validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSlice {
    pub t: f64,
    /// `e^t`.
    pub a: f64,
    /// `e^t - 1`, the reach of data given at `t = 0`.
    pub reach: f64,
}

impl TimeSlice {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain { what: "time", value: t });
        }
        Ok(Self { t, a: t.exp(), reach: t.exp_m1() })
    }

    fn geometry(&self, z: f64) -> (f64, f64, f64) {
        // (ζ, 1 - ζ, P) for a source at (0, 0).
        let z = z.abs();
        let p = (self.a + 1.0 - z) * (self.a + 1.0 + z);
        let w = ((self.reach - z) * (self.reach + z)).max(0.0);
        (w / p, 4.0 * self.a / p, p)
    }

    /// `K1(z, t)`.
    pub fn k1(&self, z: f64) -> f64 {
        let (zeta, zc, p) = self.geometry(z);
        plus_routed(zeta, zc).0 / p.sqrt()
    }

    fn k0_parts(&self, z: f64) -> (f64, f64, f64, f64) {
        let (zeta, zc, p) = self.geometry(z);
        let (minus, g, tail) = if zc < LOCUS_SWITCH {
            let (p, m, tail) = hyp_pair_log(HyperArg::with_complement(zeta, zc), LOCUS_TERMS);
            (m, (m - p) / zeta, tail)
        } else {
            let (p, m) = hyp_pair(HyperArg::with_complement(zeta, zc));
            let g = if zeta <= 0.5 { g_series(zeta) } else { (m - p) / zeta };
            (m, g, 0.0)
        };
        let value = (minus + 2.0 * self.reach * g / p) / (2.0 * p.sqrt());
        (value, zeta, zc, tail)
    }

    /// `K0(z, t)` for `0 <= z < e^t - 1`.
    pub fn k0(&self, z: f64) -> f64 {
        self.k0_parts(z).0
    }

    /// `E(x, t; 0, b)` for `b <= t` and `|x| <= e^t - e^b`.
    pub fn e(&self, x: f64, b: f64) -> f64 {
        self.layer(b).e(x)
    }

    /// The propagator from sources at time `b <= t`.
    pub fn layer(&self, b: f64) -> Layer {
        let eb = b.exp();
        Layer { a: self.a, b: eb, reach: eb * (self.t - b).exp_m1() }
    }
}

/// `E(·, t; 0, t0)` for fixed `t0 <= t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    a: f64,
    b: f64,
    /// `e^t - e^{t0}`.
    pub reach: f64,
}

impl Layer {
    /// `E(x, t; 0, t0)` for `|x| <= e^t - e^{t0}`.
    pub fn e(&self, x: f64) -> f64 {
        propagator_parts(x.abs(), self.a, self.b, self.reach).0
    }
}

/// `(E, ζ, 1-ζ, tail)` from `r`, `A`, `B` and `A - B` (passed separately so
/// callers can supply it without cancellation).
fn propagator_parts(r: f64, a: f64, b: f64, diff: f64) -> (f64, f64, f64, f64) {
    let d = diff.abs();
    let s = a + b;
    let p = (s - r) * (s + r);
    let w = ((d - r) * (d + r)).max(0.0);
    let zeta = w / p;
    let zc = 4.0 * a * b / p;
    let (f, tail) = plus_routed(zeta, zc);
    let root = p.sqrt();
    (f / root, zeta, zc, tail / root)
}

/// The fundamental solution `E(x, t; x0, t0)`.
pub fn propagator_e(q: &ConeQuery) -> Result<KernelValue> {
    if !(q.x.is_finite() && q.t.is_finite() && q.x0.is_finite() && q.t0.is_finite()) {
        return Err(Error::Domain { what: "cone query", value: f64::NAN });
    }
    if classify_cone(q) == Cone::Outside {
        return Err(Error::Support);
    }
    let (a, b) = (q.t.exp(), q.t0.exp());
    let diff = b * (q.t - q.t0).exp_m1();
    let (value, zeta, zc, tail) = propagator_parts((q.x - q.x0).abs(), a, b, diff);
    debug_assert!(zeta < 1.0);
    Ok(KernelValue { value, regime: regime(zeta, zc), est_err: 8.0 * f64::EPSILON * value + tail })
}

/// The Riemann function `R(l, m; a, b) = (l - m) E`.
pub fn riemann_r(c: &CharCoords) -> Result<f64> {
    let (l, m, a, b) = (c.l, c.m, c.a, c.b_char);
    if !(l.is_finite() && m.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain { what: "characteristic coordinate", value: f64::NAN });
    }
    let lb = l - b;
    let am = a - m;
    if !(lb > 0.0) {
        return Err(Error::Domain { what: "l - b", value: lb });
    }
    if !(am > 0.0) {
        return Err(Error::Domain { what: "a - m", value: am });
    }
    let den = lb * am;
    let zeta = -(l - a) * (m - b) / den;
    let zc = (a - b) * (l - m) / den;
    if !(zc > 0.0) {
        return Err(Error::Domain { what: "1 - ζ", value: zc });
    }
    // For ζ < 0 (outside the characteristic rectangle) the AGM form is the
    // analytic continuation.
    let f = if zc < LOCUS_SWITCH {
        hyp_pair_log(HyperArg::with_complement(zeta, zc), LOCUS_TERMS).0
    } else {
        hyp_pair(HyperArg::with_complement(zeta, zc)).0
    };
    Ok((l - m) / den.sqrt() * f)
}

fn check_slice(z: f64, t: f64) -> Result<TimeSlice> {
    let ts = TimeSlice::new(t)?;
    if !z.is_finite() {
        return Err(Error::Domain { what: "z", value: z });
    }
    if z < 0.0 || z > ts.reach * (1.0 + 1e-14) {
        return Err(Error::Support);
    }
    Ok(ts)
}

/// `K1(z, t) = E(z, t; 0, 0)` for `0 <= z <= e^t - 1`.
pub fn kernel_k1(z: f64, t: f64) -> Result<KernelValue> {
    let ts = check_slice(z, t)?;
    let (zeta, zc, p) = ts.geometry(z);
    let (f, tail) = plus_routed(zeta, zc);
    let value = f / p.sqrt();
    Ok(KernelValue { value, regime: regime(zeta, zc), est_err: 8.0 * f64::EPSILON * value + tail / p.sqrt() })
}

/// `K0(z, t)` for `0 <= z < e^t - 1`; the locus `z = e^t - 1` is an error.
pub fn kernel_k0(z: f64, t: f64) -> Result<KernelValue> {
    let ts = TimeSlice::new(t)?;
    if !z.is_finite() {
        return Err(Error::Domain { what: "z", value: z });
    }
    if z < 0.0 {
        return Err(Error::Support);
    }
    if z >= ts.reach {
        return Err(Error::SingularLocus { z, t });
    }
    let (value, zeta, zc, tail) = ts.k0_parts(z);
    Ok(KernelValue { value, regime: regime(zeta, zc), est_err: 16.0 * f64::EPSILON * value.abs() + tail })
}
