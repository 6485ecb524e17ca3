//! Numerical audits of the `L^p–L^q` decay estimates.
//!
//! Each audit samples the solution for Gaussian data at a list of times,
//! measures `‖(-Δ)^{-s} u(·, t)‖_q`, and divides by the time profile of the
//! estimate with the constant set to one. The supremum of that ratio is the
//! empirical constant; it should be finite and should not move when the
//! time grid is extended.
//!
//! Radial problems are reduced to the line: on `R^3`, `w = r u` solves the
//! line equation with data `r φ`; on `R^2` the Abel projection of `u` solves
//! it with the projected data and `u` is recovered by inverting the
//! projection.

use std::f64::consts::PI;

use desitter_core::data::{Gaussian, OddLift, Steady, Zero};
use desitter_core::field::{Geometry, Profile, SolutionField};
use desitter_core::quad::QuadratureConfig;
use desitter_core::solver_1d::{solve_cauchy_1d, solve_source_1d, CauchyData};
use serde::{Deserialize, Serialize};

use crate::fractional::{frac_laplacian_neg_s, inverse_abel};
use crate::{Error, Result};

/// The estimates under audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayEstimate {
    /// `n = 1`, source only:
    /// `‖u‖_q ≤ C e^{t/ρ - t} ∫_0^t (1 + t - b) ‖f(·, b)‖_p db`.
    LineSource,
    /// `n = 1`, Cauchy data, `p = q`:
    /// `‖u‖_q ≤ C (‖φ0‖_q + (1 + t) ‖φ1‖_q)`.
    LineLqLq,
    /// `n = 1`, Cauchy data, `1 < ρ < 2`:
    /// `‖u‖_q ≤ e^{-t/2}‖φ0‖_q + C (e^t - 1)^{1/ρ} e^{-t} ‖φ0‖_p
    /// + C (1 + t)(e^t - 1)^{1/ρ - 1}(1 - e^{-t}) ‖φ1‖_p`; `ρ = 1` is the
    /// `L^q–L^q` estimate.
    LineLpLq,
    /// `n > 1`, source only:
    /// `‖(-Δ)^{-s} u‖_q ≤ C e^{t a} ∫_0^t ‖f(·, b)‖_p (1 + t - b) db`
    /// with `a = 2s - n(1/p - 1/q)`.
    Source,
    /// `n > 1`, Cauchy data:
    /// `‖(-Δ)^{-s} u‖_q ≤ C (e^t - 1)^a (‖φ0‖_p + (1 + t)(1 - e^{-t}) ‖φ1‖_p)`.
    Cauchy,
}

impl DecayEstimate {
    pub const ALL: [DecayEstimate; 5] =
        [DecayEstimate::LineSource, DecayEstimate::LineLqLq, DecayEstimate::LineLpLq, DecayEstimate::Source, DecayEstimate::Cauchy];

    pub fn name(&self) -> &'static str {
        match self {
            DecayEstimate::LineSource => "line-source",
            DecayEstimate::LineLqLq => "line-lq-lq",
            DecayEstimate::LineLpLq => "line-lp-lq",
            DecayEstimate::Source => "source",
            DecayEstimate::Cauchy => "cauchy",
        }
    }

    pub fn is_source(&self) -> bool {
        matches!(self, DecayEstimate::LineSource | DecayEstimate::Source)
    }
}

/// Which datum carries the Gaussian; the others vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datum {
    Position,
    Velocity,
    /// Time-independent source `f(x, t) = g(x)`.
    Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "one")]
    pub rho: f64,
    pub t_grid: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

impl DecayConfig {
    /// `2s - n(1/p - 1/q)`.
    pub fn exponent(&self) -> f64 {
        2.0 * self.s - self.n as f64 * (1.0 / self.p - 1.0 / self.q)
    }
}

/// Why a configuration does not meet the hypotheses of an estimate, or
/// `None` when it does.
pub fn inadmissibility(est: DecayEstimate, cfg: &DecayConfig) -> Option<String> {
    let (p, q, s, rho, n) = (cfg.p, cfg.q, cfg.s, cfg.rho, cfg.n);
    let tol = 1e-12;
    if cfg.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Some("times must be positive".into());
    }
    match est {
        DecayEstimate::LineSource | DecayEstimate::LineLpLq => {
            if n != 1 {
                return Some(format!("the line estimates need n = 1, got {n}"));
            }
            if !(1.0..2.0).contains(&rho) {
                return Some(format!("ρ must lie in [1, 2), got {rho}"));
            }
            let inv_rho_dual = 1.0 - 1.0 / rho;
            if !(p > 1.0 && 1.0 / p > inv_rho_dual) {
                return Some(format!("need 1 < p < ρ' = {}", 1.0 / inv_rho_dual));
            }
            if ((1.0 / q) - (1.0 / p - inv_rho_dual)).abs() > tol {
                return Some(format!("need 1/q = 1/p - 1/ρ' = {}", 1.0 / p - inv_rho_dual));
            }
            None
        }
        DecayEstimate::LineLqLq => {
            if n != 1 {
                return Some(format!("the line estimates need n = 1, got {n}"));
            }
            if !(q >= 1.0) || (p - q).abs() > tol {
                return Some("need p = q >= 1".into());
            }
            None
        }
        DecayEstimate::Source | DecayEstimate::Cauchy => {
            if !(n == 2 || n == 3) {
                return Some(format!("n must be 2 or 3, got {n}"));
            }
            if !(s >= 0.0) {
                return Some("need s >= 0".into());
            }
            if !(p > 1.0 && p <= 2.0) || (1.0 / p + 1.0 / q - 1.0).abs() > tol {
                return Some("need 1 < p <= 2 and 1/p + 1/q = 1".into());
            }
            let d = n as f64 * (1.0 / p - 1.0 / q);
            let lower = 0.5 * (n as f64 + 1.0) * (1.0 / p - 1.0 / q);
            if 2.0 * s < lower - tol || 2.0 * s > d + tol {
                return Some(format!("need {lower} <= 2s <= {d}"));
            }
            if !(d < 2.0 * s + 1.0) {
                return Some(format!("need n(1/p - 1/q) = {d} < 2s + 1"));
            }
            None
        }
    }
}

/// Admissible `(p, q, s)` for the estimates on `R^n`, `n > 1`: for each `p`,
/// `s` runs over `samples` evenly spaced points of its admissible interval.
pub fn admissible_exponents(n: usize, p_values: &[f64], samples: usize) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &p in p_values {
        if !(p > 1.0 && p <= 2.0) {
            continue;
        }
        let q = p / (p - 1.0);
        let delta = 1.0 / p - 1.0 / q;
        let lo = (0.25 * (n as f64 + 1.0) * delta).max(0.5 * (n as f64 * delta - 1.0) + 1e-9);
        let hi = 0.5 * n as f64 * delta;
        if lo > hi {
            continue;
        }
        for j in 0..samples.max(1) {
            let s = if samples <= 1 { hi } else { lo + (hi - lo) * j as f64 / (samples - 1) as f64 };
            let cfg = DecayConfig { n, p, q, s, rho: 1.0, t_grid: vec![1.0] };
            if inadmissibility(DecayEstimate::Cauchy, &cfg).is_none() {
                out.push((p, q, s));
            }
        }
    }
    out
}

/// `‖A exp(-k|x|²)‖_{L^p(R^n)} = |A| (π / (k p))^{n / (2p)}`, `p = ∞` giving `|A|`.
pub fn gaussian_lp_norm(g: &Gaussian, n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return g.amplitude.abs();
    }
    g.amplitude.abs() * (PI / (g.k * p)).powf(n as f64 / (2.0 * p))
}

/// Sampling and quadrature settings shared by all audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSettings {
    pub quad: QuadratureConfig,
    /// Grid points per Gaussian width `1/√k`.
    pub points_per_width: f64,
    /// Cap on samples along one radius; the spacing grows past it.
    pub max_points: usize,
}

impl Default for AuditSettings {
    fn default() -> Self {
        Self { quad: QuadratureConfig::composite(1e-10, 1e-8), points_per_width: 10.0, max_points: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub estimate: DecayEstimate,
    pub datum: Datum,
    pub config: DecayConfig,
    /// Gaussian exponent of the data.
    pub k: f64,
    pub admissible: bool,
    pub note: Option<String>,
    pub rows: Vec<DecayRow>,
    pub sup_ratio: f64,
}

impl DecayReport {
    /// Supremum of the ratio over rows with `t <= t_max`.
    pub fn sup_ratio_upto(&self, t_max: f64) -> f64 {
        self.rows.iter().filter(|r| r.t <= t_max && r.ratio.is_finite()).fold(0.0, |m, r| m.max(r.ratio))
    }

    /// Relative change of the supremum when the grid is cut at `t_short`.
    pub fn drift(&self, t_short: f64) -> f64 {
        let short = self.sup_ratio_upto(t_short);
        if short == 0.0 {
            return if self.sup_ratio == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.sup_ratio - short).abs() / short
    }
}

/// Default time grid: `[0.1, 5]` followed by the extension to `8`.
pub fn default_t_grid() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 7.0, 8.0]
}

struct Grid {
    dx: f64,
    /// Samples at `i dx`, `i = 0..=m`.
    m: usize,
    support: f64,
}

fn grid_for(g: &Gaussian, t: f64, settings: &AuditSettings) -> Grid {
    let support = g.cutoff() + t.exp_m1();
    let width = 1.0 / g.k.sqrt();
    let mut dx = width / settings.points_per_width;
    if support / dx > settings.max_points as f64 {
        dx = support / settings.max_points as f64;
    }
    let m = (support / dx).ceil() as usize + 4;
    Grid { dx, m, support }
}

fn sample_half<F: FnMut(f64) -> Result<f64>>(grid: &Grid, mut f: F) -> Result<Vec<f64>> {
    (0..=grid.m).map(|i| f(i as f64 * grid.dx)).collect()
}

fn mirrored(t: f64, grid: &Grid, half: &[f64]) -> SolutionField {
    let mut v: Vec<f64> = half[1..].iter().rev().copied().collect();
    v.extend_from_slice(half);
    let mut f = SolutionField::new(Geometry::Line, t, -(grid.m as f64) * grid.dx, grid.dx, v);
    f.support = Some(grid.support);
    f
}

/// Line solution for even data at `x >= 0`, by datum.
fn line_values(datum: Datum, p: &dyn Profile, t: f64, grid: &Grid, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    match datum {
        Datum::Position => sample_half(grid, |x| Ok(solve_cauchy_1d(&CauchyData::initial(p, &Zero), x, t, cfg)?.u)),
        Datum::Velocity => sample_half(grid, |x| Ok(solve_cauchy_1d(&CauchyData::initial(&Zero, p), x, t, cfg)?.u)),
        Datum::Source => {
            let f = Steady(ProfileRef(p));
            sample_half(grid, |x| Ok(solve_source_1d(&f, x, t, cfg)?.u))
        }
    }
}

struct ProfileRef<'a>(&'a dyn Profile);

impl Profile for ProfileRef<'_> {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.0.derivative(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

/// `u(·, t)` for radial Gaussian data on `R^n`, `n ∈ {1, 2, 3}`.
pub fn radial_solution(n: usize, datum: Datum, g: &Gaussian, t: f64, settings: &AuditSettings) -> Result<SolutionField> {
    let grid = grid_for(g, t, settings);
    match n {
        1 => Ok(mirrored(t, &grid, &line_values(datum, g, t, &grid, &settings.quad)?)),
        2 => {
            let projected = Gaussian { amplitude: g.amplitude * (PI / g.k).sqrt(), ..*g };
            let half = line_values(datum, &projected, t, &grid, &settings.quad)?;
            inverse_abel(&mirrored(t, &grid, &half))
        }
        3 => {
            let lift = OddLift(*g);
            let w = line_values(datum, &lift, t, &grid, &settings.quad)?;
            let mut u: Vec<f64> = w.iter().enumerate().map(|(i, w)| if i == 0 { 0.0 } else { w / (i as f64 * grid.dx) }).collect();
            u[0] = (4.0 * u[1] - u[2]) / 3.0;
            let mut f = SolutionField::new(Geometry::Radial(3), t, 0.0, grid.dx, u);
            f.support = Some(grid.support);
            Ok(f)
        }
        _ => Err(desitter_core::Error::UnsupportedDimension(n).into()),
    }
}

/// `‖(-Δ)^{-s} u‖_q` with the periodic grid four supports wide.
pub fn fractional_norm(field: &SolutionField, s: f64, q: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(field.lq_norm(q)?);
    }
    let reach = field.support.unwrap_or(field.x_max());
    let half_width = 4.0 * reach;
    let n_points = ((2.0 * half_width / field.dx).ceil() as usize).next_power_of_two().max(64);
    Ok(frac_laplacian_neg_s(field, s, half_width, n_points)?.field.lq_norm(q)?)
}

/// Time profile of the estimate with `C = 1` for Gaussian data `g` in the
/// role `datum`.
pub fn rhs_shape(est: DecayEstimate, datum: Datum, cfg: &DecayConfig, g: &Gaussian, t: f64) -> f64 {
    let n = cfg.n;
    let np = gaussian_lp_norm(g, n, cfg.p);
    let nq = gaussian_lp_norm(g, n, cfg.q);
    let em1 = t.exp_m1();
    let decay = -(-t).exp_m1();
    // ∫_0^t (1 + t - b) db for a steady source.
    let source_weight = t + 0.5 * t * t;
    let (p0, p1) = match datum {
        Datum::Position => (1.0, 0.0),
        Datum::Velocity => (0.0, 1.0),
        Datum::Source => (0.0, 0.0),
    };
    match est {
        DecayEstimate::LineSource => (t / cfg.rho - t).exp() * source_weight * np,
        DecayEstimate::LineLqLq => p0 * nq + p1 * (1.0 + t) * nq,
        DecayEstimate::LineLpLq if cfg.rho == 1.0 => p0 * nq + p1 * (1.0 + t) * nq,
        DecayEstimate::LineLpLq => {
            let r = 1.0 / cfg.rho;
            p0 * ((-0.5 * t).exp() * nq + em1.powf(r) * (-t).exp() * np) + p1 * (1.0 + t) * em1.powf(r - 1.0) * decay * np
        }
        DecayEstimate::Source => (t * cfg.exponent()).exp() * source_weight * np,
        DecayEstimate::Cauchy => em1.powf(cfg.exponent()) * (p0 * np + p1 * (1.0 + t) * decay * np),
    }
}

fn check_datum(est: DecayEstimate, datum: Datum) -> Result<()> {
    if est.is_source() != (datum == Datum::Source) {
        return Err(Error::validation(format!("datum {datum:?} does not fit the {} estimate", est.name())));
    }
    Ok(())
}

fn audit(est: DecayEstimate, datum: Datum, cfg: &DecayConfig, g: &Gaussian, settings: &AuditSettings) -> Result<DecayReport> {
    check_datum(est, datum)?;
    let note = inadmissibility(est, cfg);
    let mut report = DecayReport {
        estimate: est,
        datum,
        config: cfg.clone(),
        k: g.k,
        admissible: note.is_none(),
        note,
        rows: Vec::new(),
        sup_ratio: 0.0,
    };
    if !report.admissible {
        return Ok(report);
    }
    if est == DecayEstimate::LineLpLq && cfg.rho == 1.0 {
        report.note = Some("ρ = 1: audited against the L^q–L^q estimate".into());
    }
    for &t in &cfg.t_grid {
        let u = radial_solution(cfg.n, datum, g, t, settings)?;
        let lhs = fractional_norm(&u, cfg.s, cfg.q)?;
        let rhs = rhs_shape(est, datum, cfg, g, t);
        // 0/0 rows (vanishing data) carry no information.
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        report.rows.push(DecayRow { t, lhs, rhs_shape: rhs, ratio });
    }
    report.sup_ratio = report.rows.iter().fold(0.0, |m, r| m.max(r.ratio));
    Ok(report)
}

/// Audit an estimate for the steady source `f(x, t) = g(|x|)`.
pub fn audit_source_decay(est: DecayEstimate, cfg: &DecayConfig, g: &Gaussian, settings: &AuditSettings) -> Result<DecayReport> {
    audit(est, Datum::Source, cfg, g, settings)
}

/// Audit an estimate for Cauchy data with `g` in the role `datum`.
pub fn audit_cauchy_decay(
    est: DecayEstimate,
    datum: Datum,
    cfg: &DecayConfig,
    g: &Gaussian,
    settings: &AuditSettings,
) -> Result<DecayReport> {
    audit(est, datum, cfg, g, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, p: f64, q: f64, s: f64, rho: f64) -> DecayConfig {
        DecayConfig { n, p, q, s, rho, t_grid: vec![0.5, 1.0] }
    }

    #[test]
    fn admissibility_rules() {
        assert!(inadmissibility(DecayEstimate::LineSource, &cfg(1, 2.0, 6.0, 0.0, 1.5)).is_none());
        assert!(inadmissibility(DecayEstimate::LineSource, &cfg(1, 2.0, 5.0, 0.0, 1.5)).is_some());
        assert!(inadmissibility(DecayEstimate::LineSource, &cfg(1, 3.5, 6.0, 0.0, 1.5)).is_some());
        assert!(inadmissibility(DecayEstimate::LineLqLq, &cfg(1, 2.0, 2.0, 0.0, 1.0)).is_none());
        assert!(inadmissibility(DecayEstimate::Cauchy, &cfg(3, 4.0 / 3.0, 4.0, 0.6, 1.0)).is_none());
        assert!(inadmissibility(DecayEstimate::Cauchy, &cfg(3, 4.0 / 3.0, 4.0, 0.4, 1.0)).is_some());
        assert!(inadmissibility(DecayEstimate::Cauchy, &cfg(1, 4.0 / 3.0, 4.0, 0.4, 1.0)).is_some());
    }

    #[test]
    fn enumeration_respects_the_constraints() {
        for n in [2, 3] {
            let list = admissible_exponents(n, &[1.1, 1.25, 4.0 / 3.0, 1.5, 2.0], 3);
            assert!(!list.is_empty());
            for (p, q, s) in list {
                let c = DecayConfig { n, p, q, s, rho: 1.0, t_grid: vec![1.0] };
                assert!(inadmissibility(DecayEstimate::Source, &c).is_none(), "{n} {p} {s}");
                assert!((-1.0..=0.0).contains(&c.exponent()), "{}", c.exponent());
            }
        }
    }

    #[test]
    fn gaussian_norms() {
        let g = Gaussian::new(1.0);
        assert!((gaussian_lp_norm(&g, 1, 2.0) - (PI / 2.0).sqrt().sqrt()).abs() < 1e-15);
        assert!((gaussian_lp_norm(&g, 3, 1.0) - PI.powf(1.5)).abs() < 1e-12);
        let f = radial_solution(1, Datum::Position, &g, 1e-9, &AuditSettings::default()).unwrap();
        assert!((f.lq_norm(2.0).unwrap() - gaussian_lp_norm(&g, 1, 2.0)).abs() < 1e-6);
    }

    #[test]
    fn radial_reductions_reproduce_the_data_at_small_times() {
        let g = Gaussian::new(0.5);
        let settings = AuditSettings::default();
        for n in [2, 3] {
            let u = radial_solution(n, Datum::Position, &g, 1e-6, &settings).unwrap();
            // The inverse projection is second order: 10 points per width
            // leave a few parts in a thousand near the origin.
            let tol = if n == 2 { 5e-3 } else { 1e-3 };
            for r in [0.0, 0.7, 2.0] {
                assert!((u.sample(r) - g.value(r)).abs() < tol, "n {n} r {r} {}", u.sample(r));
            }
            let mass = u.lq_norm(1.0).unwrap();
            assert!((mass - gaussian_lp_norm(&g, n, 1.0)).abs() < tol * gaussian_lp_norm(&g, n, 1.0), "n {n} mass {mass}");
        }
    }

    #[test]
    fn radial_reductions_agree_with_the_spherical_mean_solver() {
        use desitter_core::data::Radial;
        use desitter_core::solver_nd::{solve_cauchy_nd, SphericalMeanCfg};
        let g = Gaussian::new(1.0);
        let settings = AuditSettings { points_per_width: 40.0, ..AuditSettings::default() };
        let sm = SphericalMeanCfg::new(QuadratureConfig::composite(1e-10, 1e-8));
        let t = 0.8;
        let u3 = radial_solution(3, Datum::Velocity, &g, t, &settings).unwrap();
        let u2 = radial_solution(2, Datum::Velocity, &g, t, &settings).unwrap();
        for r in [0.0, 0.6, 1.5] {
            let e3 = solve_cauchy_nd::<3>(&Zero, &Radial(g), [r, 0.0, 0.0], t, &sm).unwrap().u;
            let e2 = solve_cauchy_nd::<2>(&Zero, &Radial(g), [r, 0.0], t, &sm).unwrap().u;
            assert!((u3.sample(r) - e3).abs() < 1e-4, "n 3 r {r} {} {e3}", u3.sample(r));
            assert!((u2.sample(r) - e2).abs() < 1e-3 * e2.abs().max(0.1), "n 2 r {r} {} {e2}", u2.sample(r));
        }
    }

    #[test]
    fn vanishing_data_give_an_empty_but_valid_report() {
        let g = Gaussian { amplitude: 0.0, ..Gaussian::new(1.0) };
        let r = audit_source_decay(DecayEstimate::LineSource, &cfg(1, 2.0, 6.0, 0.0, 1.5), &g, &AuditSettings::default()).unwrap();
        assert!(r.admissible);
        assert_eq!(r.sup_ratio, 0.0);
        assert!(r.rows.iter().all(|row| row.lhs == 0.0 && row.ratio == 0.0));
    }

    #[test]
    fn inadmissible_configurations_are_recorded_not_run() {
        let g = Gaussian::new(1.0);
        let r = audit_cauchy_decay(DecayEstimate::Cauchy, Datum::Velocity, &cfg(3, 1.5, 3.0, 0.0, 1.0), &g, &AuditSettings::default())
            .unwrap();
        assert!(!r.admissible && r.rows.is_empty() && r.note.is_some());
        assert!(audit_cauchy_decay(DecayEstimate::Cauchy, Datum::Source, &cfg(3, 1.5, 3.0, 0.5, 1.0), &g, &AuditSettings::default())
            .is_err());
    }
}
