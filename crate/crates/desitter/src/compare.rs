//! Closed-form solutions against the finite-difference reference.

use desitter_core::data::{OddLift, Zero};
use desitter_core::fd::{fd_solve_1d, fd_solve_radial3d, FdGrid};
use desitter_core::field::{Profile, SolutionField};
use desitter_core::quad::QuadratureConfig;
use desitter_core::solver_1d::{solve_1d, solve_cauchy_1d, CauchyData};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdComparison {
    pub n: usize,
    pub t: f64,
    /// Half-width of the line grid, or outer radius of the radial grid.
    pub extent: f64,
    pub nx: usize,
    pub rel_l2_error: f64,
    pub refined_nx: usize,
    pub refined_rel_l2_error: f64,
    /// `rel_l2_error / refined_rel_l2_error`; about 4 for a second-order scheme.
    pub reduction: f64,
    pub fd_steps: usize,
    /// Largest quadrature error estimate of the closed-form samples.
    pub max_est_err: f64,
}

/// Closed-form values at the nodes of `grid` with their largest error estimate.
fn exact_nodes(n: usize, phi0: &dyn Profile, phi1: &dyn Profile, grid: &FdGrid, cfg: &QuadratureConfig) -> Result<(Vec<f64>, f64)> {
    let mut max_err = 0.0f64;
    let mut values = Vec::with_capacity(grid.nx);
    match n {
        1 => {
            let data = CauchyData::initial(phi0, phi1);
            for i in 0..grid.nx {
                let s = solve_1d(&data, grid.x(i), grid.t_end, cfg)?;
                max_err = max_err.max(s.est_err);
                values.push(s.u);
            }
        }
        3 => {
            let (l0, l1) = (OddLift(ProfileRef(phi0)), OddLift(ProfileRef(phi1)));
            let data = CauchyData::initial(&l0, &l1);
            for i in 0..grid.nx {
                let r = grid.x(i);
                if r == 0.0 {
                    values.push(0.0);
                    continue;
                }
                let s = solve_cauchy_1d(&data, r, grid.t_end, cfg)?;
                max_err = max_err.max(s.est_err / r);
                values.push(s.u / r);
            }
            values[0] = (4.0 * values[1] - values[2]) / 3.0;
        }
        _ => return Err(Error::validation(format!("FD comparison is available for n = 1 and n = 3, not {n}"))),
    }
    Ok((values, max_err))
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

fn fd_run(n: usize, phi0: &dyn Profile, phi1: &dyn Profile, grid: &FdGrid) -> Result<SolutionField> {
    Ok(match n {
        1 => fd_solve_1d(&CauchyData::initial(phi0, phi1), grid)?,
        _ => fd_solve_radial3d(phi0, phi1, &Zero, grid)?,
    })
}

/// `‖a - b‖ / ‖b‖` over the nodes, with trapezoid weights and `r²` on the
/// radial grid. `stride` picks every `stride`-th entry of `a`.
fn rel_l2(n: usize, a: &[f64], stride: usize, b: &[f64], dx: f64) -> f64 {
    let last = b.len() - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, bv) in b.iter().enumerate() {
        let mut w = if i == 0 || i == last { 0.5 } else { 1.0 };
        if n == 3 {
            w *= (i as f64 * dx).powi(2);
        }
        let d = a[i * stride] - bv;
        num += w * d * d;
        den += w * bv * bv;
    }
    (num / den).sqrt()
}

/// Compare the FD solution for data `(φ0, φ1)` at time `t` with the closed
/// form on `nx` nodes, and again after one refinement (`2 nx - 1` nodes on
/// the same interval). `n = 3` treats the data as radial profiles.
pub fn compare_fd(n: usize, phi0: &dyn Profile, phi1: &dyn Profile, t: f64, nx: usize, cfg: &QuadratureConfig) -> Result<FdComparison> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!("time must be positive, got {t}")));
    }
    let support = CauchyData::initial(phi0, phi1)
        .support_radius()
        .ok_or_else(|| Error::validation("FD comparison needs compactly supported (or cut off) data"))?;
    let extent = 1.25 * (support + t.exp_m1());
    let lo = if n == 3 { 0.0 } else { -extent };
    let coarse = FdGrid::new(lo, extent, nx, t);
    let fine = FdGrid::new(lo, extent, 2 * nx - 1, t);
    let (exact, max_est_err) = exact_nodes(n, phi0, phi1, &coarse, cfg)?;
    let fd = fd_run(n, phi0, phi1, &coarse)?;
    let fd_fine = fd_run(n, phi0, phi1, &fine)?;
    let e1 = rel_l2(n, &fd.values, 1, &exact, coarse.dx());
    let e2 = rel_l2(n, &fd_fine.values, 2, &exact, coarse.dx());
    Ok(FdComparison {
        n,
        t,
        extent,
        nx,
        rel_l2_error: e1,
        refined_nx: fine.nx,
        refined_rel_l2_error: e2,
        reduction: e1 / e2,
        fd_steps: fd.steps.unwrap_or(0),
        max_est_err,
    })
}
