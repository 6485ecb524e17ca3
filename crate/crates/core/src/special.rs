//! Gauss hypergeometric values used by the kernels.
//!
//! `F(1/2,1/2;1;z)` and `F(-1/2,1/2;1;z)` are `(2/π)K(√z)` and `(2/π)E(√z)`
//! and are computed through the arithmetic-geometric mean. Near `z = 1` the
//! kernels switch to the logarithmic expansion of the balanced case
//! (Abramowitz & Stegun 15.3.10). Arguments carry their complement `1 - z`
//! so that callers who know it exactly do not lose it to rounding.

use core::f64::consts::{FRAC_2_PI, PI};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::quad::{self, DeNode, QuadratureConfig};
use crate::{Error, Result};

/// Default term budget for truncated series.
pub const DEFAULT_TERMS: usize = 64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A hypergeometric argument together with its complement `1 - z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperArg {
    z: f64,
    zc: f64,
}

impl HyperArg {
    /// Argument whose complement is obtained by subtraction.
    pub fn new(z: f64) -> Self {
        Self { z, zc: 1.0 - z }
    }

    /// Argument given through its complement `w = 1 - z`.
    pub fn from_complement(w: f64) -> Self {
        Self { z: 1.0 - w, zc: w }
    }

    /// Both parts computed independently by the caller.
    pub fn with_complement(z: f64, zc: f64) -> Self {
        Self { z, zc }
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn complement(&self) -> f64 {
        self.zc
    }

    fn check(&self, allow_one: bool) -> Result<()> {
        if !self.z.is_finite() || !self.zc.is_finite() || self.z < 0.0 {
            return Err(Error::Domain { what: "hypergeometric argument", value: self.z });
        }
        if self.zc < 0.0 || (self.zc == 0.0 && !allow_one) {
            return Err(Error::Singularity { z: self.z });
        }
        Ok(())
    }
}

impl From<f64> for HyperArg {
    fn from(z: f64) -> Self {
        Self::new(z)
    }
}

/// How a truncated series was cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    /// Number of terms summed.
    pub n_max: usize,
    /// Estimated magnitude of the neglected tail.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub truncation: SeriesTruncation,
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain { what: "agm argument", value: a });
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain { what: "agm argument", value: b });
    }
    Ok(agm_unchecked(a, b))
}

fn agm_unchecked(mut a: f64, mut g: f64) -> f64 {
    for _ in 0..64 {
        if (a - g).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    0.5 * (a + g)
}

/// `F(1/2,1/2;1;z) = (2/π)K(√z)` for `0 <= z < 1`.
pub fn hyp_half(z: impl Into<HyperArg>) -> Result<f64> {
    let z = z.into();
    z.check(false)?;
    Ok(1.0 / agm_unchecked(1.0, z.zc.sqrt()))
}

/// `F(-1/2,1/2;1;z) = (2/π)E(√z)` for `0 <= z <= 1`.
pub fn hyp_minus_half(z: impl Into<HyperArg>) -> Result<f64> {
    let z = z.into();
    if z.z > 1.0 || z.zc < 0.0 {
        return Err(Error::Domain { what: "hypergeometric argument", value: z.z });
    }
    z.check(true)?;
    if z.zc == 0.0 {
        return Ok(FRAC_2_PI);
    }
    Ok(hyp_pair(z).1)
}

/// `(F(1/2,1/2;1;z), F(-1/2,1/2;1;z))` through the AGM with sums.
///
/// The argument must satisfy `0 <= z < 1`; this is not checked.
pub fn hyp_pair(z: HyperArg) -> (f64, f64) {
    let mut a = 1.0;
    let mut g = z.zc.sqrt();
    // E/K = 1 - sum 2^{n-1} c_n^2 with c_0^2 = z; the n = 0 term is folded in.
    let mut ratio = 0.5 * (1.0 + z.zc);
    let mut weight = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - g);
        weight *= 2.0;
        ratio -= weight * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    let plus = 1.0 / a;
    (plus, plus * ratio)
}

/// `d/dz F(1/2,1/2;1;z)` for `0 <= z < 1`; equals 1/4 at `z = 0`.
pub fn hyp_half_derivative(z: impl Into<HyperArg>) -> Result<f64> {
    let z = z.into();
    z.check(false)?;
    if z.z <= 0.5 {
        // Termwise derivative of sum ((1/2)_k / k!)^2 z^k.
        let mut c = 1.0;
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 1..400 {
            let kf = k as f64;
            let r = (kf - 0.5) / kf;
            c *= r * r;
            let term = kf * c * power;
            sum += term;
            power *= z.z;
            if term <= 1e-17 * sum {
                break;
            }
        }
        return Ok(sum);
    }
    let (plus, minus) = hyp_pair(z);
    Ok((minus / z.zc - plus) / (2.0 * z.z))
}

/// Plain Gauss series for `F(a,b;c;z)`, `|z| < 1`, with a geometric tail bound.
pub fn gauss_series(a: f64, b: f64, c: f64, z: f64, n_max: usize) -> SeriesSum {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0;
    let mut ratio = 0.0;
    while n < n_max {
        let nf = n as f64;
        ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        n += 1;
        if term == 0.0 || (term.abs() <= 1e-17 * sum.abs() && ratio.abs() < 1.0) {
            break;
        }
    }
    let q = ratio.abs().max(z.abs());
    let tail_bound = if q < 1.0 { term.abs() * q / (1.0 - q) } else { f64::INFINITY };
    SeriesSum { value: sum, truncation: SeriesTruncation { n_max: n + 1, tail_bound } }
}

/// `F(1/2,β;3/2;z)`, the auxiliary family appearing in the kernel bounds.
pub fn hyp_aux(beta: f64, z: impl Into<HyperArg>) -> Result<f64> {
    let arg = z.into();
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain { what: "beta", value: beta });
    }
    if !arg.z.is_finite() || arg.z < 0.0 || arg.z > 1.0 || arg.zc < 0.0 {
        return Err(Error::Domain { what: "hypergeometric argument", value: arg.z });
    }
    if arg.zc == 0.0 {
        if beta >= 1.0 {
            return Err(Error::Singularity { z: arg.z });
        }
        // Gauss summation.
        return Ok(gamma(1.5) * gamma(1.0 - beta) / gamma(1.5 - beta));
    }
    if arg.z <= 0.9 {
        return Ok(gauss_series(0.5, beta, 1.5, arg.z, 100_000).value);
    }
    if beta == 1.0 {
        let x = arg.z.sqrt();
        return Ok(((1.0 + x).ln() + (1.0 + x).ln() - arg.zc.ln()) / (2.0 * x));
    }
    let gap = 1.0 - beta;
    if (gap - gap.round()).abs() < 0.05 {
        return aux_by_quadrature(beta, arg);
    }
    // Connection formula 15.3.6; the first companion series collapses to z^{-1/2}.
    let w = arg.zc;
    let head = if is_nonpositive_integer(1.5 - beta) {
        0.0
    } else {
        gamma(1.5) * gamma(gap) / gamma(1.5 - beta)
    };
    let tail_coef = gamma(1.5) * gamma(beta - 1.0) / (gamma(0.5) * gamma(beta));
    let series = gauss_series(1.0, 1.5 - beta, 2.0 - beta, w, 10_000).value;
    Ok(head / arg.z.sqrt() + w.powf(gap) * tail_coef * series)
}

/// Euler integral `∫_0^1 (1 - z s^2)^{-β} ds`, used where the connection
/// formula degenerates.
fn aux_by_quadrature(beta: f64, arg: HyperArg) -> Result<f64> {
    let cfg = QuadratureConfig::double_exponential(0.0, 1e-14);
    let est = quad::tanh_sinh_nodes(
        |node: DeNode| {
            let s = node.x;
            let gap = arg.zc + arg.z * node.from_b * (1.0 + s);
            gap.powf(-beta)
        },
        0.0,
        1.0,
        &cfg,
    )?;
    Ok(est.value)
}

/// `F(a,b;a+b;z)` by the logarithmic expansion about `z = 1` (A&S 15.3.10).
///
/// Valid for `1 - z < 0.1`; the returned tail bound covers the truncation.
pub fn hyp_log_expansion(
    a: f64,
    b: f64,
    c: f64,
    z: impl Into<HyperArg>,
    n_max: usize,
) -> Result<SeriesSum> {
    let arg = z.into();
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::Domain { what: "series parameter", value: a + b + c });
    }
    if (c - (a + b)).abs() > 1e-12 * (1.0 + c.abs()) {
        return Err(Error::OutOfRegime("logarithmic expansion needs c = a + b"));
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Err(Error::OutOfRegime("polynomial case has no logarithmic expansion"));
    }
    arg.check(false)?;
    if arg.z > 1.0 {
        return Err(Error::Domain { what: "hypergeometric argument", value: arg.z });
    }
    let w = arg.zc;
    if w >= 0.1 {
        return Err(Error::OutOfRegime("logarithmic expansion needs 1 - z < 0.1"));
    }
    let log_w = w.ln();
    let pref = gamma(a + b) / (gamma(a) * gamma(b));
    let mut coef = 1.0;
    let mut digammas = -2.0 * EULER_GAMMA - digamma(a) - digamma(b);
    let mut power = 1.0;
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut used = 0;
    for n in 0..n_max.max(1) {
        let nf = n as f64;
        last = coef * (digammas - log_w) * power;
        sum += last;
        used = n + 1;
        if n >= 2 && last.abs() <= 1e-17 * sum.abs() {
            break;
        }
        coef *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        digammas += 2.0 / (nf + 1.0) - 1.0 / (a + nf) - 1.0 / (b + nf);
        power *= w;
    }
    let tail = 2.0 * (pref * last).abs() * w / (1.0 - w);
    Ok(SeriesSum {
        value: pref * sum,
        truncation: SeriesTruncation { n_max: used, tail_bound: tail },
    })
}

/// `(F(1/2,1/2;1;z), F(-1/2,1/2;1;z), tail)` from the logarithmic expansion
/// in `w = 1 - z`; the second function is reconstructed from the derivative
/// of the first, so both share one series.
pub fn hyp_pair_log(arg: HyperArg, n_terms: usize) -> (f64, f64, f64) {
    let w = arg.zc;
    let log_w = w.ln();
    let mut coef = 1.0 / PI;
    // 2ψ(1) - 2ψ(1/2) = 4 ln 2
    let mut d = 4.0 * core::f64::consts::LN_2;
    let mut power = 1.0;
    let mut plus = 0.0;
    let mut slope = 0.0;
    let mut last = 0.0;
    for n in 0..n_terms.max(2) {
        let nf = n as f64;
        let bracket = d - log_w;
        last = coef * bracket * power;
        plus += last;
        slope += coef * power * (nf * bracket - 1.0);
        if n >= 2 && last.abs() <= 1e-17 * plus {
            break;
        }
        let r = (nf + 0.5) / (nf + 1.0);
        coef *= r * r;
        d += 2.0 / (nf + 1.0) - 2.0 / (nf + 0.5);
        power *= w;
    }
    // F- = (1-z)F+ + 2z(1-z)F+'  and  (1-z)F+' = -sum c_n w^n [n(d_n - ln w) - 1].
    let minus = w * plus - 2.0 * arg.z * slope;
    let tail = 2.0 * last.abs() * w / (1.0 - w);
    (plus, minus, tail)
}

/// Digamma function ψ(x).
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || (x <= 0.0 && x == x.floor()) {
        return f64::NAN;
    }
    if x < 0.0 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - series
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Kummer's function `M(a, b, -x)` for `x >= 0`.
pub fn kummer_neg(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain { what: "Kummer argument", value: x });
    }
    if is_nonpositive_integer(b) {
        return Err(Error::Domain { what: "Kummer parameter b", value: b });
    }
    if x <= 40.0 {
        // Kummer transformation M(a,b,-x) = e^{-x} M(b-a,b,x).
        let c = b - a;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..2000 {
            let kf = k as f64;
            term *= (c + kf) / (b + kf) * x / (kf + 1.0);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() && kf > x {
                break;
            }
        }
        return Ok((-x).exp() * sum);
    }
    if is_nonpositive_integer(b - a) {
        return Ok(0.0);
    }
    // Large-argument expansion; the exponentially small companion is dropped.
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        let next = term * (a + kf) * (a - b + 1.0 + kf) / ((kf + 1.0) * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(gamma(b) / gamma(b - a) * x.powf(-a) * sum)
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}
