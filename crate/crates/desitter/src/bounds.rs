//! Numerical audits of the kernel integral bounds.
//!
//! With `z = e^t`, each bound compares an integral of `K1` or `K0` over
//! `[0, z - 1]` with an explicit function of `z`. The audit tabulates
//! `LHS / RHS` on a logarithmic grid and checks that its supremum is finite
//! and does not move under refinement of the grid and of the quadrature.

use desitter_core::kernels::TimeSlice;
use desitter_core::quad::{tanh_sinh, QuadratureConfig};
use desitter_core::special::{hyp_aux, HyperArg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelBound {
    /// `∫ K1^ρ dr ≤ C (1 + ln z)^ρ (z - 1)(z + 1)^{-ρ} F(1/2, ρ/2; 3/2; ((z-1)/(z+1))²)`,
    /// `1 <= ρ < 2`.
    K1Power,
    /// `∫ r^a K1 dr ≤ C (1 + ln z) z^{-1} (z - 1)^{1 + a}`, `-1 < a <= 0`.
    K1Weighted,
    /// `(∫ |K0|^ρ dr)^{1/ρ} ≤ C (z - 1)^{1/ρ} (z + 1)^{-1}`, `1 <= ρ < 2`.
    K0Power,
    /// `∫ r^a |K0| dr ≤ C z^{-1} (z - 1)^{1 + a}`, `a > -1`.
    K0Weighted,
}

impl KernelBound {
    pub const ALL: [KernelBound; 4] = [KernelBound::K1Power, KernelBound::K1Weighted, KernelBound::K0Power, KernelBound::K0Weighted];

    pub fn name(&self) -> &'static str {
        match self {
            KernelBound::K1Power => "k1-power",
            KernelBound::K1Weighted => "k1-weighted",
            KernelBound::K0Power => "k0-power",
            KernelBound::K0Weighted => "k0-weighted",
        }
    }

    /// Parameter values audited by default (`ρ` or `a`).
    pub fn default_params(&self) -> &'static [f64] {
        match self {
            KernelBound::K1Power | KernelBound::K0Power => &[1.0, 1.25, 1.5, 1.75],
            KernelBound::K1Weighted => &[-0.75, -0.5, -0.25, 0.0],
            KernelBound::K0Weighted => &[-0.75, -0.5, -0.25, 0.0, 0.5],
        }
    }

    pub fn validate(&self, param: f64) -> Result<()> {
        let ok = match self {
            KernelBound::K1Power | KernelBound::K0Power => (1.0..2.0).contains(&param),
            KernelBound::K1Weighted => param > -1.0 && param <= 0.0,
            KernelBound::K0Weighted => param > -1.0 && param.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("parameter {param} outside the range of the {} bound", self.name())))
        }
    }
}

/// `n` points from `lo` to `hi`, evenly spaced in `ln z`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
}

/// The audit grid: 40 points on `[1.01, e^8]`.
pub fn default_z_grid() -> Vec<f64> {
    log_grid(1.01, 8f64.exp(), 40)
}

fn slice(z: f64) -> Result<TimeSlice> {
    if !(z > 1.0 && z.is_finite()) {
        return Err(desitter_core::Error::Domain { what: "z", value: z }.into());
    }
    Ok(TimeSlice { t: z.ln(), a: z, reach: z - 1.0 })
}

/// Left-hand side with its quadrature error estimate.
pub fn bound_lhs(bound: KernelBound, param: f64, z: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    bound.validate(param)?;
    let ts = slice(z)?;
    let l = ts.reach;
    let est = match bound {
        KernelBound::K1Power => tanh_sinh(|r| ts.k1(r).powf(param), 0.0, l, cfg)?,
        KernelBound::K1Weighted => tanh_sinh(|r| r.powf(param) * ts.k1(r), 0.0, l, cfg)?,
        KernelBound::K0Power => tanh_sinh(|r| ts.k0(r).abs().powf(param), 0.0, l, cfg)?,
        KernelBound::K0Weighted => tanh_sinh(|r| r.powf(param) * ts.k0(r).abs(), 0.0, l, cfg)?,
    };
    if bound == KernelBound::K0Power {
        let v = est.value.powf(1.0 / param);
        return Ok((v, v * est.err / (param * est.value)));
    }
    Ok((est.value, est.err))
}

/// Right-hand side with `C = 1`.
pub fn bound_rhs(bound: KernelBound, param: f64, z: f64) -> Result<f64> {
    bound.validate(param)?;
    slice(z)?;
    let zm = z - 1.0;
    let lz = 1.0 + z.ln();
    Ok(match bound {
        KernelBound::K1Power => {
            let x = (zm / (z + 1.0)).powi(2);
            let xc = 4.0 * z / (z + 1.0).powi(2);
            lz.powf(param) * zm * (z + 1.0).powf(-param) * hyp_aux(0.5 * param, HyperArg::with_complement(x, xc))?
        }
        KernelBound::K1Weighted => lz * zm.powf(1.0 + param) / z,
        KernelBound::K0Power => zm.powf(1.0 / param) / (z + 1.0),
        KernelBound::K0Weighted => zm.powf(1.0 + param) / z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub z: f64,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: KernelBound,
    pub param: f64,
    pub rows: Vec<BoundRow>,
    pub sup_ratio: f64,
    /// Supremum on the doubled grid with quadrature tolerances cut a hundredfold.
    pub refined_sup_ratio: f64,
    /// Points whose quadrature did not converge; they are left out of the rows.
    pub failed: Vec<f64>,
    pub stable: bool,
}

/// Relative change allowed between the plain and refined suprema.
pub const STABILITY_TOL: f64 = 0.01;

fn tighten(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { abs_tol: cfg.abs_tol * 1e-2, rel_tol: (cfg.rel_tol * 1e-2).max(1e-14), ..*cfg }
}

fn refine(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push((w[0] * w[1]).sqrt());
    }
    out.extend(grid.last());
    out
}

fn tabulate(bound: KernelBound, param: f64, grid: &[f64], cfg: &QuadratureConfig) -> Result<(Vec<BoundRow>, Vec<f64>)> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut failed = Vec::new();
    for &z in grid {
        match bound_lhs(bound, param, z, cfg) {
            Ok((lhs, lhs_err)) => {
                let rhs = bound_rhs(bound, param, z)?;
                rows.push(BoundRow { z, lhs, lhs_err, rhs, ratio: lhs / rhs });
            }
            Err(Error::Core(desitter_core::Error::Accuracy { .. })) => failed.push(z),
            Err(e) => return Err(e),
        }
    }
    Ok((rows, failed))
}

fn sup(rows: &[BoundRow]) -> f64 {
    rows.iter().fold(0.0, |m, r| if r.ratio.is_finite() { m.max(r.ratio) } else { f64::INFINITY })
}

pub fn audit_bound(bound: KernelBound, param: f64, z_grid: &[f64], cfg: &QuadratureConfig) -> Result<BoundReport> {
    bound.validate(param)?;
    if z_grid.is_empty() {
        return Err(Error::validation("empty z grid"));
    }
    let (rows, mut failed) = tabulate(bound, param, z_grid, cfg)?;
    let (fine, fine_failed) = tabulate(bound, param, &refine(z_grid), &tighten(cfg))?;
    failed.extend(fine_failed);
    let (s, sf) = (sup(&rows), sup(&fine));
    let stable = failed.is_empty() && s.is_finite() && s > 0.0 && (sf - s).abs() <= STABILITY_TOL * s;
    Ok(BoundReport { bound, param, rows, sup_ratio: s, refined_sup_ratio: sf, failed, stable })
}

/// Check `LHS <= margin · sup_ratio · RHS` at `samples` random points of the
/// grid's range. Returns the largest `LHS / (sup_ratio · RHS)` seen.
pub fn recheck(report: &BoundReport, samples: usize, seed: u64, cfg: &QuadratureConfig) -> Result<f64> {
    let lo = report.rows.iter().map(|r| r.z).fold(f64::INFINITY, f64::min);
    let hi = report.rows.iter().map(|r| r.z).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = (rng.gen_range(lo.ln()..=hi.ln())).exp();
        let (lhs, _) = bound_lhs(report.bound, report.param, z, cfg)?;
        worst = worst.max(lhs / (report.sup_ratio * bound_rhs(report.bound, report.param, z)?));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    /// `(t, ∫_0^{e^t - 1} |K0(r, t)| dr)`.
    pub rows: Vec<(f64, f64)>,
    pub sup: f64,
    pub refined_sup: f64,
    pub stable: bool,
}

/// `∫_0^{e^t - 1} |K0(r, t)| dr` at time `t`.
pub fn k0_mass(t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let ts = TimeSlice::new(t)?;
    Ok(tanh_sinh(|r| ts.k0(r).abs(), 0.0, ts.reach, cfg)?.value)
}

/// Uniform bound on the `L^1` norm of `K0` over a time grid, checked under
/// refinement like [`audit_bound`].
pub fn audit_k0_mass(t_grid: &[f64], cfg: &QuadratureConfig) -> Result<ConstantReport> {
    if t_grid.is_empty() {
        return Err(Error::validation("empty t grid"));
    }
    let rows: Vec<(f64, f64)> = t_grid.iter().map(|&t| Ok((t, k0_mass(t, cfg)?))).collect::<Result<_>>()?;
    let mut fine_t = Vec::with_capacity(2 * t_grid.len());
    for w in t_grid.windows(2) {
        fine_t.extend([w[0], 0.5 * (w[0] + w[1])]);
    }
    fine_t.extend(t_grid.last());
    let fine_cfg = tighten(cfg);
    let refined_sup = fine_t.iter().map(|&t| k0_mass(t, &fine_cfg)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let sup = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
    let stable = sup.is_finite() && (refined_sup - sup).abs() <= STABILITY_TOL * sup;
    Ok(ConstantReport { rows, sup, refined_sup, stable })
}

/// Default quadrature for the bound audits.
pub fn default_quadrature() -> QuadratureConfig {
    QuadratureConfig::double_exponential(1e-13, 1e-9)
}
