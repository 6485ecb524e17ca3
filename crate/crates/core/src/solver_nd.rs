//! Spherical means and the solution formulas on `R^n`, `n = 2, 3`.
//!
//! Everything reduces to `v_φ(x, r)`, the solution at time `r` of the flat
//! wave equation `v_tt = Δv` with `v = φ`, `v_t = 0` at time zero:
//!
//! ```text
//! n = 3:  v = ∂_r (r M(r)) = M(r) + r M'(r),
//! n = 2:  v = ∫_0^{π/2} sin η [M(ρ) + ρ M'(ρ)]_{ρ = r sin η} dη,
//! ```
//!
//! with `M(r)` the mean of `φ` over the sphere of radius `r` about `x` and
//! `M'(r)` the mean of `∇φ(x + r y)·y`. The `n = 2` form is Poisson's formula
//! after substituting `|y| = sin η` in the ball integral. The derivative is
//! taken analytically through the gradient of the data. For `n = 1` the same
//! code gives d'Alembert's `v = M`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::field::{Field, SourceField};
use crate::kernels::TimeSlice;
use crate::quad::{gauss_kronrod, tanh_sinh, Estimate, GaussLegendre, QuadratureConfig, Rule};
use crate::solver_1d::{last_source_time, Inner, SolutionSample, TAIL};
use crate::{Error, Result};

/// Largest angular resolution, as a multiple of the configured one.
const MAX_DOUBLINGS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalMeanCfg {
    /// Nodes on the circle (`n = 2`), or azimuthal nodes with half as many
    /// polar Gauss nodes (`n = 3`). Even, at least 16.
    pub n_angular: usize,
    /// Rule for the radial and time integrals.
    pub radial_rule: QuadratureConfig,
}

impl Default for SphericalMeanCfg {
    fn default() -> Self {
        Self { n_angular: 64, radial_rule: QuadratureConfig::default() }
    }
}

impl SphericalMeanCfg {
    pub fn new(radial_rule: QuadratureConfig) -> Self {
        Self { radial_rule, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_angular < 16 || self.n_angular % 2 != 0 {
            return Err(Error::Setup("n_angular must be even and at least 16"));
        }
        self.radial_rule.validate()
    }
}

fn check_dim(n: usize) -> Result<()> {
    match n {
        1..=3 => Ok(()),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// Angular rules for one dimension, built once per solve. Resolution
/// doubles from `n_angular / 2` until consecutive means agree.
struct Sphere<const N: usize> {
    levels: Vec<usize>,
    polar: Vec<GaussLegendre>,
    abs_tol: f64,
    rel_tol: f64,
}

impl<const N: usize> Sphere<N> {
    fn new(cfg: &SphericalMeanCfg) -> Result<Self> {
        check_dim(N)?;
        cfg.validate()?;
        let levels: Vec<usize> = (0..=MAX_DOUBLINGS + 1).map(|k| (cfg.n_angular / 2) << k).collect();
        let polar = if N == 3 { levels.iter().map(|m| GaussLegendre::new(m / 2)).collect() } else { Vec::new() };
        Ok(Self { levels, polar, abs_tol: cfg.radial_rule.abs_tol, rel_tol: cfg.radial_rule.rel_tol })
    }

    /// `(M, M')` at one resolution level.
    fn level<F: Field<N> + ?Sized>(&self, phi: &F, x: &[f64; N], r: f64, k: usize) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        let mut add = |y: [f64; 3], w: f64| {
            let p: [f64; N] = core::array::from_fn(|i| x[i] + r * y[i]);
            let g = phi.gradient(p);
            let radial: f64 = (0..N).map(|i| g[i] * y[i]).sum();
            acc.0 += w * phi.value(p);
            acc.1 += w * radial;
        };
        match N {
            1 => {
                add([1.0, 0.0, 0.0], 0.5);
                add([-1.0, 0.0, 0.0], 0.5);
            }
            2 => {
                let m = self.levels[k];
                for j in 0..m {
                    let a = 2.0 * PI * j as f64 / m as f64;
                    add([a.cos(), a.sin(), 0.0], 1.0 / m as f64);
                }
            }
            _ => {
                let m = self.levels[k];
                let gl = &self.polar[k];
                for (mu, wmu) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - mu * mu).sqrt();
                    for j in 0..m {
                        let a = 2.0 * PI * j as f64 / m as f64;
                        add([s * a.cos(), s * a.sin(), *mu], 0.5 * wmu / m as f64);
                    }
                }
            }
        }
        acc
    }

    /// `(M(r), M'(r))` with automatic doubling.
    fn means<F: Field<N> + ?Sized>(&self, phi: &F, x: &[f64; N], r: f64) -> (f64, f64) {
        if N == 1 || r == 0.0 {
            return self.level(phi, x, r, 0);
        }
        let mut prev = self.level(phi, x, r, 0);
        for k in 1..self.levels.len() {
            let cur = self.level(phi, x, r, k);
            let tol = |v: f64| self.abs_tol.max(self.rel_tol * v.abs());
            if (cur.0 - prev.0).abs() <= tol(cur.0) && (cur.1 - prev.1).abs() <= tol(cur.1) {
                return cur;
            }
            prev = cur;
        }
        prev
    }

    /// `v_φ(x, r)`.
    fn wave<F: Field<N> + ?Sized>(&self, phi: &F, x: &[f64; N], r: f64, rule: &QuadratureConfig) -> Result<Estimate> {
        let r = r.abs();
        match N {
            1 => Ok(Estimate { value: self.means(phi, x, r).0, ..Estimate::default() }),
            2 => {
                if r == 0.0 {
                    return Ok(Estimate { value: phi.value(*x), ..Estimate::default() });
                }
                gauss_kronrod(
                    |eta| {
                        let rho = r * eta.sin();
                        let (m, dm) = self.means(phi, x, rho);
                        eta.sin() * (m + rho * dm)
                    },
                    0.0,
                    FRAC_PI_2,
                    &rule.with_rule(Rule::GaussLegendreComposite),
                )
            }
            _ => {
                let (m, dm) = self.means(phi, x, r);
                Ok(Estimate { value: m + r * dm, ..Estimate::default() })
            }
        }
    }
}

/// Mean of `φ` over the sphere of radius `r` about `x`.
pub fn spherical_mean<const N: usize, F: Field<N> + ?Sized>(phi: &F, x: [f64; N], r: f64, cfg: &SphericalMeanCfg) -> Result<f64> {
    Ok(Sphere::<N>::new(cfg)?.means(phi, &x, r.abs()).0)
}

/// `v_φ(x, r)`: the flat wave solution with data `(φ, 0)` at time `r`.
pub fn wave_kirchhoff<const N: usize, F: Field<N> + ?Sized>(phi: &F, x: [f64; N], r: f64, cfg: &SphericalMeanCfg) -> Result<f64> {
    Ok(Sphere::<N>::new(cfg)?.wave(phi, &x, r, &cfg.radial_rule)?.value)
}

fn norm<const N: usize>(x: &[f64; N]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Radii in `[0, reach]` where `v_φ(x, r)` can be nonzero for `φ` supported
/// in `|y| <= R`: a shell for odd `n`, everything past `|x| - R` for `n = 2`.
fn wave_window(n: usize, dist: f64, support: Option<f64>, reach: f64) -> Option<(f64, f64)> {
    let (lo, hi) = match support {
        Some(r) if n == 2 => ((dist - r).max(0.0), reach),
        Some(r) => ((dist - r).max(0.0), (dist + r).min(reach)),
        None => (0.0, reach),
    };
    (hi > lo).then_some((lo, hi))
}

/// Solution with Cauchy data on `R^N`:
///
/// ```text
/// u = e^{-t/2} v_{φ0}(x, L) + 2 ∫_0^L v_{φ0}(x, z) K0(z, t) dz + 2 ∫_0^L v_{φ1}(x, z) K1(z, t) dz,
/// ```
///
/// `L = e^t - 1`. The `K0` integral uses the double-exponential rule.
pub fn solve_cauchy_nd<const N: usize>(
    phi0: &dyn Field<N>,
    phi1: &dyn Field<N>,
    x: [f64; N],
    t: f64,
    cfg: &SphericalMeanCfg,
) -> Result<SolutionSample<[f64; N]>> {
    let sphere = Sphere::<N>::new(cfg)?;
    let ts = TimeSlice::new(t)?;
    let rule = &cfg.radial_rule;
    let l = ts.reach;
    let dist = norm(&x);
    let mut u = 0.0;
    let mut est_err = 0.0;
    if wave_window(N, dist, phi0.support_radius(), l).is_some_and(|(_, hi)| hi >= l) {
        let e = sphere.wave(phi0, &x, l, rule)?;
        u += (-0.5 * t).exp() * e.value;
        est_err += e.err;
    }
    if let Some((lo, hi)) = wave_window(N, dist, phi0.support_radius(), l) {
        let mut inner = Inner::default();
        let outer = tanh_sinh(
            |z| 2.0 * inner.take(sphere.wave(phi0, &x, z, rule)) * ts.k0(z),
            lo,
            hi,
            &rule.with_rule(Rule::DoubleExponential),
        );
        let (v, e) = inner.finish(outer, 2.0 * (hi - lo))?;
        u += v;
        est_err += e;
    }
    if let Some((lo, hi)) = wave_window(N, dist, phi1.support_radius(), l) {
        let mut inner = Inner::default();
        let outer = gauss_kronrod(
            |z| 2.0 * inner.take(sphere.wave(phi1, &x, z, rule)) * ts.k1(z),
            lo,
            hi,
            &rule.with_rule(Rule::GaussLegendreComposite),
        );
        let (v, e) = inner.finish(outer, 2.0 * (hi - lo))?;
        u += v;
        est_err += e;
    }
    Ok(SolutionSample { x, t, u, est_err: est_err + 4.0 * f64::EPSILON * u.abs() })
}

/// A source frozen at one time.
struct Frozen<'a, const N: usize> {
    f: &'a dyn SourceField<N>,
    b: f64,
}

impl<const N: usize> Field<N> for Frozen<'_, N> {
    fn value(&self, x: [f64; N]) -> f64 {
        self.f.value(x, self.b)
    }
    fn gradient(&self, x: [f64; N]) -> [f64; N] {
        self.f.gradient(x, self.b)
    }
    fn support_radius(&self) -> Option<f64> {
        self.f.support_radius()
    }
}

/// Solution of the source problem on `R^N` with vanishing data:
///
/// ```text
/// u = 2 ∫_0^t db ∫_0^{e^t - e^b} v(x, r; b) E(r, t; 0, b) dr,
/// ```
///
/// `v(·, ·; b)` the flat wave solution with data `(f(·, b), 0)`. The outer
/// integral is split at `t - TAIL` as in the line solver.
pub fn solve_source_nd<const N: usize>(
    f: &dyn SourceField<N>,
    x: [f64; N],
    t: f64,
    cfg: &SphericalMeanCfg,
) -> Result<SolutionSample<[f64; N]>> {
    let sphere = Sphere::<N>::new(cfg)?;
    let ts = TimeSlice::new(t)?;
    let rule = &cfg.radial_rule;
    let composite = rule.with_rule(Rule::GaussLegendreComposite);
    let dist = norm(&x);
    let support = f.support_radius();
    let Some(b_max) = last_source_time(t, support, dist) else {
        return Ok(SolutionSample { x, t, u: 0.0, est_err: 0.0 });
    };
    let mut outer_inner = Inner::default();
    let mut layer_integral = |b: f64| {
        let layer = ts.layer(b);
        let Some((lo, hi)) = wave_window(N, dist, support, layer.reach) else { return 0.0 };
        let frozen = Frozen { f, b };
        let mut inner = Inner::default();
        let e = gauss_kronrod(|r| inner.take(sphere.wave(&frozen, &x, r, rule)) * layer.e(r), lo, hi, &composite);
        let r = inner.finish(e, hi - lo).map(|(value, err)| Estimate { value, err, evals: 0 });
        2.0 * outer_inner.take(r)
    };
    let split = (t - TAIL).clamp(0.0, b_max);
    let outer = gauss_kronrod(&mut layer_integral, 0.0, split, &composite).and_then(|bulk| {
        let tail = tanh_sinh(&mut layer_integral, split, b_max, &rule.with_rule(Rule::DoubleExponential))?;
        Ok(bulk + tail)
    });
    let (u, est_err) = outer_inner.finish(outer, 2.0 * b_max)?;
    Ok(SolutionSample { x, t, u, est_err })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuygensRow {
    pub t: f64,
    pub u_desitter: f64,
    /// Flat-space solution with the same data at the same front radius `e^t - 1`.
    pub u_flat: f64,
    pub est_err: f64,
}

/// Solution at the origin of `R^3` with data `(0, φ1)`, next to the flat
/// wave solution whose front has travelled the same distance `e^t - 1`.
///
/// Once the front has passed the origin the flat solution vanishes
/// identically while the de Sitter solution keeps a tail.
pub fn huygens_tail_probe(phi1: &dyn Field<3>, t_grid: &[f64], cfg: &SphericalMeanCfg) -> Result<Vec<HuygensRow>> {
    let sphere = Sphere::<3>::new(cfg)?;
    let zero = crate::data::Zero;
    t_grid
        .iter()
        .map(|&t| {
            let s = solve_cauchy_nd::<3>(&zero, phi1, [0.0; 3], t, cfg)?;
            let radius = t.exp_m1();
            // Flat solution with data (0, φ1) at time τ: τ M_{φ1}(x, τ).
            let u_flat = radius * sphere.means(phi1, &[0.0; 3], radius).0;
            Ok(HuygensRow { t, u_desitter: s.u, u_flat, est_err: s.est_err })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Constant, FnField, Gaussian, Radial, Steady, Zero};

    fn cfg() -> SphericalMeanCfg {
        SphericalMeanCfg::new(QuadratureConfig::composite(1e-11, 1e-10))
    }

    #[test]
    fn means_of_simple_fields() {
        let c = cfg();
        let one = Radial(Constant(1.0));
        assert!((spherical_mean::<3, _>(&one, [0.3, 0.1, -2.0], 1.7, &c).unwrap() - 1.0).abs() < 1e-14);
        let x1 = FnField { value: |x: [f64; 2]| x[0], gradient: |_| [1.0, 0.0], support: None };
        assert!((spherical_mean(&x1, [0.4, -1.0], 2.5, &c).unwrap() - 0.4).abs() < 1e-14);
        let sq = FnField { value: |x: [f64; 3]| x.iter().map(|v| v * v).sum(), gradient: |x: [f64; 3]| x.map(|v| 2.0 * v), support: None };
        assert!((spherical_mean(&sq, [0.0; 3], 1.3, &c).unwrap() - 1.69).abs() < 1e-13);
    }

    #[test]
    fn wave_of_quadratic() {
        // φ = |x|²: v(x, r) = |x|² + n r².
        let c = cfg();
        let sq3 = FnField { value: |x: [f64; 3]| x.iter().map(|v| v * v).sum(), gradient: |x: [f64; 3]| x.map(|v| 2.0 * v), support: None };
        let v = wave_kirchhoff(&sq3, [0.5, 0.0, 0.0], 0.8, &c).unwrap();
        assert!((v - (0.25 + 3.0 * 0.64)).abs() < 1e-12, "{v}");
        let sq2 = FnField { value: |x: [f64; 2]| x[0] * x[0] + x[1] * x[1], gradient: |x: [f64; 2]| x.map(|v| 2.0 * v), support: None };
        let v = wave_kirchhoff(&sq2, [0.5, 0.0], 0.8, &c).unwrap();
        assert!((v - (0.25 + 2.0 * 0.64)).abs() < 1e-10, "{v}");
        assert!((wave_kirchhoff(&sq2, [0.5, 0.0], 0.0, &c).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(wave_kirchhoff::<4, _>(&Zero, [0.0; 4], 1.0, &c), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn constant_data_are_exact() {
        let c = cfg();
        let one = Radial(Constant(1.0));
        for t in [0.5, 2.0] {
            let u = solve_cauchy_nd::<3>(&one, &Zero, [0.2, 0.0, 0.1], t, &c).unwrap();
            assert!((u.u - 1.0).abs() < 1e-8, "{}", u.u);
            let u = solve_cauchy_nd::<2>(&Zero, &one, [0.2, 0.0], t, &c).unwrap();
            assert!((u.u - t).abs() < 1e-8, "{}", u.u);
            let u = solve_source_nd::<2>(&Steady(one), [0.0, 0.3], t, &c).unwrap();
            assert!((u.u - 0.5 * t * t).abs() < 1e-8, "{}", u.u);
        }
    }

    #[test]
    fn line_case_matches_the_1d_solver() {
        use crate::solver_1d::{solve_cauchy_1d, CauchyData};
        let g = Gaussian::new(2.0);
        let c = cfg();
        let a = solve_cauchy_nd::<1>(&Radial(g), &Radial(g), [0.4], 1.2, &c).unwrap();
        let b = solve_cauchy_1d(&CauchyData::initial(&g, &g), 0.4, 1.2, &c.radial_rule).unwrap();
        assert!((a.u - b.u).abs() < 1e-9, "{} {}", a.u, b.u);
    }
}
