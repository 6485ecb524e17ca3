//! The one dimensional problem `u_tt - e^{2t} u_xx = f`.
//!
//! Three representations are evaluated by quadrature: the source formula
//! (a double integral of `f` against `E` over the backward cone), its folded
//! form through solutions of the string equation, and the formula for Cauchy
//! data through the kernels `K0`, `K1`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::data::Zero;
use crate::field::{joint_support, Geometry, Profile, SolutionField, Source};
use crate::kernels::TimeSlice;
use crate::quad::{gauss_kronrod, tanh_sinh, Estimate, QuadratureConfig, Rule};
use crate::{Error, Result};

/// Width of the final stretch of source times integrated with the
/// double-exponential rule.
pub const TAIL: f64 = 1e-2;

/// `u` at one point with its estimated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSample<X = f64> {
    pub x: X,
    pub t: f64,
    pub u: f64,
    pub est_err: f64,
}

/// Initial data and source term for the line.
#[derive(Clone, Copy)]
pub struct CauchyData<'a> {
    pub phi0: &'a dyn Profile,
    pub phi1: &'a dyn Profile,
    pub source: &'a dyn Source,
}

impl<'a> CauchyData<'a> {
    pub fn new(phi0: &'a dyn Profile, phi1: &'a dyn Profile, source: &'a dyn Source) -> Self {
        Self { phi0, phi1, source }
    }

    /// Cauchy data without source.
    pub fn initial(phi0: &'a dyn Profile, phi1: &'a dyn Profile) -> Self {
        Self { phi0, phi1, source: &Zero }
    }

    /// A source with vanishing initial data.
    pub fn source_only(source: &'a dyn Source) -> Self {
        Self { phi0: &Zero, phi1: &Zero, source }
    }

    pub fn support_radius(&self) -> Option<f64> {
        joint_support(&[self.phi0.support_radius(), self.phi1.support_radius(), self.source.support_radius()])
    }
}

/// Bookkeeping for integrals evaluated inside an outer integrand.
#[derive(Default)]
pub(crate) struct Inner {
    err: f64,
    failure: Option<Error>,
}

impl Inner {
    pub(crate) fn take(&mut self, r: Result<Estimate>) -> f64 {
        match r {
            Ok(e) => {
                self.err = self.err.max(e.err);
                e.value
            }
            Err(Error::Accuracy { estimate, est_err }) => {
                self.err = self.err.max(est_err);
                self.failure.get_or_insert(Error::Accuracy { estimate, est_err });
                estimate
            }
            Err(e) => {
                self.failure = Some(e);
                f64::NAN
            }
        }
    }

    /// Combine with the outer estimate; `span` is the length of the outer range.
    pub(crate) fn finish(self, outer: Result<Estimate>, span: f64) -> Result<(f64, f64)> {
        if let Some(e) = &self.failure {
            if !matches!(e, Error::Accuracy { .. }) {
                return Err(e.clone());
            }
        }
        let outer = outer?;
        let err = outer.err + span * self.err;
        match self.failure {
            Some(_) => Err(Error::Accuracy { estimate: outer.value, est_err: err }),
            None => Ok((outer.value, err)),
        }
    }
}

/// Latest source time whose forward cone reaches `x` at time `t` from a
/// source supported in `|y| <= R`; `None` if no source time does.
pub(crate) fn last_source_time(t: f64, support: Option<f64>, dist: f64) -> Option<f64> {
    let d0 = support.map_or(0.0, |r| (dist - r).max(0.0));
    if d0 >= t.exp_m1() {
        return None;
    }
    Some(t + (-d0 * (-t).exp()).ln_1p())
}

/// Radii `z ∈ [0, reach]` at which a function supported in `|y| <= R`
/// can be nonzero on the sphere of radius `z` about a point at distance
/// `dist` from the origin.
pub(crate) fn shell_window(dist: f64, support: Option<f64>, reach: f64) -> Option<(f64, f64)> {
    let (lo, hi) = match support {
        Some(r) => ((dist - r).max(0.0), (dist + r).min(reach)),
        None => (0.0, reach),
    };
    (hi > lo).then_some((lo, hi))
}

/// `u(x, t)` for a source with vanishing data:
/// `u = ∫_0^t db ∫_{|x-y| <= e^t-e^b} f(y, b) E(x-y, t; 0, b) dy`.
///
/// The outer integral uses the composite rule up to `t - TAIL` and the
/// double-exponential rule beyond.
pub fn solve_source_1d(f: &dyn Source, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    let ts = TimeSlice::new(t)?;
    cfg.validate()?;
    let support = f.support_radius();
    let Some(b_max) = last_source_time(t, support, x.abs()) else {
        return Ok(SolutionSample { x, t, u: 0.0, est_err: 0.0 });
    };
    let composite = cfg.with_rule(Rule::GaussLegendreComposite);
    let mut inner = Inner::default();
    let mut layer_integral = |b: f64| {
        let layer = ts.layer(b);
        let (mut lo, mut hi) = (x - layer.reach, x + layer.reach);
        if let Some(r) = support {
            lo = lo.max(-r);
            hi = hi.min(r);
        }
        if hi <= lo {
            return 0.0;
        }
        inner.take(gauss_kronrod(|y| f.value(y, b) * layer.e(x - y), lo, hi, &composite))
    };
    let split = (t - TAIL).clamp(0.0, b_max);
    let outer = gauss_kronrod(&mut layer_integral, 0.0, split, &composite).and_then(|bulk| {
        let tail = tanh_sinh(&mut layer_integral, split, b_max, &cfg.with_rule(Rule::DoubleExponential))?;
        Ok(bulk + tail)
    });
    let (u, est_err) = inner.finish(outer, b_max)?;
    Ok(SolutionSample { x, t, u, est_err })
}

/// `u(x, t)` for a source by the folded formula
/// `u = 2 ∫_0^t db ∫_0^{e^t-e^b} v(x, z; b) E(z, t; 0, b) dz` with
/// `v(x, z; b) = (f(x+z, b) + f(x-z, b)) / 2`.
///
/// The quadrature path differs from [`solve_source_1d`]: the outer integral
/// is double-exponential throughout and the inner one runs over `z >= 0`.
pub fn solve_source_duhamel(f: &dyn Source, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    let ts = TimeSlice::new(t)?;
    cfg.validate()?;
    let support = f.support_radius();
    let Some(b_max) = last_source_time(t, support, x.abs()) else {
        return Ok(SolutionSample { x, t, u: 0.0, est_err: 0.0 });
    };
    let composite = cfg.with_rule(Rule::GaussLegendreComposite);
    let mut inner = Inner::default();
    let layer_integral = |b: f64| {
        let layer = ts.layer(b);
        match shell_window(x.abs(), support, layer.reach) {
            Some((lo, hi)) => inner.take(gauss_kronrod(
                |z| (f.value(x + z, b) + f.value(x - z, b)) * layer.e(z),
                lo,
                hi,
                &composite,
            )),
            None => 0.0,
        }
    };
    let outer = tanh_sinh(layer_integral, 0.0, b_max, &cfg.with_rule(Rule::DoubleExponential));
    let (u, est_err) = inner.finish(outer, b_max)?;
    Ok(SolutionSample { x, t, u, est_err })
}

/// `u(x, t)` for Cauchy data `(φ0, φ1)`, ignoring `data.source`:
///
/// ```text
/// u = e^{-t/2} [φ0(x+L) + φ0(x-L)] / 2 + ∫_0^L [φ0(x-z) + φ0(x+z)] K0(z,t) dz
///     + ∫_0^L [φ1(x-z) + φ1(x+z)] K1(z,t) dz,      L = e^t - 1.
/// ```
///
/// The `K0` integral uses the double-exponential rule.
pub fn solve_cauchy_1d(data: &CauchyData, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    let ts = TimeSlice::new(t)?;
    cfg.validate()?;
    let l = ts.reach;
    let (phi0, phi1) = (data.phi0, data.phi1);
    let mut u = 0.5 * (-0.5 * t).exp() * (phi0.value(x + l) + phi0.value(x - l));
    let mut est_err = 4.0 * f64::EPSILON * u.abs();
    if let Some((lo, hi)) = shell_window(x.abs(), phi0.support_radius(), l) {
        let e = tanh_sinh(
            |z| (phi0.value(x - z) + phi0.value(x + z)) * ts.k0(z),
            lo,
            hi,
            &cfg.with_rule(Rule::DoubleExponential),
        )?;
        u += e.value;
        est_err += e.err;
    }
    if let Some((lo, hi)) = shell_window(x.abs(), phi1.support_radius(), l) {
        let e = gauss_kronrod(
            |z| (phi1.value(x - z) + phi1.value(x + z)) * ts.k1(z),
            lo,
            hi,
            &cfg.with_rule(Rule::GaussLegendreComposite),
        )?;
        u += e.value;
        est_err += e.err;
    }
    Ok(SolutionSample { x, t, u, est_err })
}

/// Cauchy data and source together.
pub fn solve_1d(data: &CauchyData, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<SolutionSample> {
    let c = solve_cauchy_1d(data, x, t, cfg)?;
    let s = solve_source_1d(data.source, x, t, cfg)?;
    Ok(SolutionSample { x, t, u: c.u + s.u, est_err: c.est_err + s.est_err })
}

/// Uniform grid `x0 + i dx`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl LineGrid {
    /// `n` points from `lo` to `hi` inclusive.
    pub fn span(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Setup("grid needs two or more points on a nonempty interval"));
        }
        Ok(Self { x0: lo, dx: (hi - lo) / (n - 1) as f64, n })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }
}

/// Evaluate a pointwise solver on a grid; returns the samples as a field
/// (line geometry) together with the largest error estimate.
pub fn solve_on_grid<F>(grid: &LineGrid, t: f64, mut solve: F) -> Result<(SolutionField, f64)>
where
    F: FnMut(f64) -> Result<SolutionSample>,
{
    let mut values = Vec::with_capacity(grid.n);
    let mut max_err = 0.0f64;
    for i in 0..grid.n {
        let s = solve(grid.x(i))?;
        values.push(s.u);
        max_err = max_err.max(s.est_err);
    }
    Ok((SolutionField::new(Geometry::Line, t, grid.x0, grid.dx, values), max_err))
}

/// Times at which the solution is sampled for the trace check.
pub const TRACE_TIMES: [f64; 3] = [1e-3, 2e-3, 4e-3];
/// Required agreement of the extrapolated traces with the data.
pub const TRACE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub x: f64,
    pub phi0: f64,
    /// Extrapolated `u(x, 0)`.
    pub u0: f64,
    pub phi1: f64,
    /// Extrapolated `u_t(x, 0)`.
    pub ut0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub rows: Vec<TraceRow>,
    pub max_err_u: f64,
    pub max_err_ut: f64,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.max_err_u <= TRACE_TOL && self.max_err_ut <= TRACE_TOL
    }
}

/// Value and derivative at `t = 0` of the quadratic through three samples.
pub fn extrapolate_to_zero(times: &[f64; 3], values: &[f64; 3]) -> (f64, f64) {
    let mut v0 = 0.0;
    let mut d0 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let den = (times[i] - times[j]) * (times[i] - times[k]);
        v0 += values[i] * times[j] * times[k] / den;
        d0 -= values[i] * (times[j] + times[k]) / den;
    }
    (v0, d0)
}

/// Check that `solve` attains the initial data: samples at [`TRACE_TIMES`]
/// are extrapolated to `t = 0` by a quadratic fit.
pub fn initial_trace_check<F>(phi0: &dyn Profile, phi1: &dyn Profile, xs: &[f64], mut solve: F) -> Result<TraceReport>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut rows = Vec::with_capacity(xs.len());
    let (mut max_err_u, mut max_err_ut) = (0.0f64, 0.0f64);
    for &x in xs {
        let mut values = [0.0; 3];
        for (v, &t) in values.iter_mut().zip(TRACE_TIMES.iter()) {
            *v = solve(x, t)?;
        }
        let (u0, ut0) = extrapolate_to_zero(&TRACE_TIMES, &values);
        let row = TraceRow { x, phi0: phi0.value(x), u0, phi1: phi1.value(x), ut0 };
        max_err_u = max_err_u.max((row.u0 - row.phi0).abs());
        max_err_ut = max_err_ut.max((row.ut0 - row.phi1).abs());
        rows.push(row);
    }
    Ok(TraceReport { rows, max_err_u, max_err_ut })
}

/// [`initial_trace_check`] for [`solve_cauchy_1d`].
pub fn initial_trace_check_1d(data: &CauchyData, xs: &[f64], cfg: &QuadratureConfig) -> Result<TraceReport> {
    initial_trace_check(data.phi0, data.phi1, xs, |x, t| Ok(solve_cauchy_1d(data, x, t, cfg)?.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Constant, FnSource, Gaussian, Steady};

    fn tight() -> QuadratureConfig {
        QuadratureConfig::composite(1e-12, 1e-11)
    }

    #[test]
    fn constant_data_are_exact() {
        let cfg = tight();
        for t in [0.5, 1.0, 2.0] {
            let one = Constant(1.0);
            let u = solve_cauchy_1d(&CauchyData::initial(&one, &Zero), 0.3, t, &cfg).unwrap();
            assert!((u.u - 1.0).abs() < 1e-9, "{t} {}", u.u);
            let u = solve_cauchy_1d(&CauchyData::initial(&Zero, &one), -0.7, t, &cfg).unwrap();
            assert!((u.u - t).abs() < 1e-9, "{t} {}", u.u);
            let f = Steady(one);
            let u = solve_source_1d(&f, 0.1, t, &cfg).unwrap();
            assert!((u.u - 0.5 * t * t).abs() < 1e-9, "{t} {}", u.u);
            let u = solve_source_duhamel(&f, 0.1, t, &cfg).unwrap();
            assert!((u.u - 0.5 * t * t).abs() < 1e-9, "{t} {}", u.u);
        }
    }

    #[test]
    fn zero_outside_the_cone() {
        let g = Gaussian::new(4.0);
        let r = g.support_radius().unwrap();
        let t: f64 = 1.0;
        let x = r + t.exp_m1() + 0.01;
        // Only the Gaussian tail beyond its nominal support remains.
        let u = solve_cauchy_1d(&CauchyData::initial(&g, &g), x, t, &tight()).unwrap();
        assert!(u.u.abs() < 1e-17);
        let u = solve_source_1d(&Steady(g), -x, t, &tight()).unwrap();
        assert_eq!(u.u, 0.0);
    }

    #[test]
    fn routes_agree() {
        let f = FnSource { f: |x: f64, t: f64| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.5 * t.sin()), support: Some(7.0) };
        for (x, t) in [(0.0, 0.4), (1.5, 1.3), (-2.0, 2.2)] {
            let a = solve_source_1d(&f, x, t, &tight()).unwrap();
            let b = solve_source_duhamel(&f, x, t, &tight()).unwrap();
            assert!((a.u - b.u).abs() < 1e-10, "{x} {t}: {} {}", a.u, b.u);
        }
    }

    #[test]
    fn odd_source_vanishes_at_origin() {
        let f = FnSource { f: |x: f64, _| x * (-x * x).exp(), support: Some(7.0) };
        let u = solve_source_duhamel(&f, 0.0, 1.0, &tight()).unwrap();
        assert!(u.u.abs() < 1e-14);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let ts = TRACE_TIMES;
        let v = ts.map(|t| 2.0 - 3.0 * t + 5.0 * t * t);
        let (v0, d0) = extrapolate_to_zero(&ts, &v);
        assert!((v0 - 2.0).abs() < 1e-12 && (d0 + 3.0).abs() < 1e-8);
    }

    #[test]
    fn traces() {
        let g = Gaussian::new(1.0);
        let r = initial_trace_check_1d(&CauchyData::initial(&g, &g), &[0.0, 0.5], &tight()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.rows[0].u0 - 1.0).abs() < 1e-4);
    }
}
