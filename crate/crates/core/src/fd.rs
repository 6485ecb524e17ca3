//! Finite-difference reference solver.
//!
//! Second-order central differences in space and a leapfrog (position
//! Verlet) step in time with the coefficient `e^{2t}` taken at the
//! half-step. The step `Δt = cfl · Δx · e^{-t}` shrinks as the speed grows.
//! Boundaries are homogeneous Dirichlet; the setup checks that the region of
//! influence of the data stays at least [`MIN_MARGIN`] cells away from them.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::field::{joint_support, Geometry, Profile, SolutionField, Source};
use crate::solver_1d::CauchyData;
use crate::{Error, Result};

/// Cells required between the region of influence and the boundary.
pub const MIN_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of grid points, boundaries included.
    pub nx: usize,
    /// Safety factor in `(0, 1)`.
    pub cfl: f64,
    pub t_end: f64,
}

impl FdGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, t_end: f64) -> Self {
        Self { x_min, x_max, nx, cfl: 0.5, t_end }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 4 || !(self.x_max > self.x_min) || !(self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::Setup("grid needs four or more points on a finite interval"));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Setup("CFL factor must lie in (0, 1)"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Setup("end time must be positive"));
        }
        Ok(())
    }

    /// Cells between the region of influence of data supported in
    /// `|x| <= support` and the nearest boundary; `lower` is false when the
    /// left boundary is a symmetry axis.
    fn check_margin(&self, support: Option<f64>, lower: bool) -> Result<()> {
        let Some(r) = support else { return Ok(()) };
        let reach = r + self.t_end.exp_m1();
        let dx = self.dx();
        let mut cells = (self.x_max - reach) / dx;
        if lower {
            cells = cells.min((-reach - self.x_min) / dx);
        }
        if cells < MIN_MARGIN {
            return Err(Error::DomainTooSmall { cells });
        }
        Ok(())
    }
}

/// March `u_tt = e^{2t} u_xx + g(i, t)` from `t = 0` to `t_end` with the
/// end values held at zero; returns the number of steps.
fn march<G: FnMut(usize, f64) -> f64>(u: &mut [f64], v: &mut [f64], grid: &FdGrid, mut g: G) -> usize {
    let n = u.len();
    let dx = grid.dx();
    let mut t = 0.0;
    let mut steps = 0;
    let mut lap = vec![0.0; n];
    for w in [&mut *u, &mut *v] {
        w[0] = 0.0;
        w[n - 1] = 0.0;
    }
    while t < grid.t_end {
        let dt = (grid.cfl * dx * (-t).exp()).min(grid.t_end - t);
        let half = 0.5 * dt;
        for i in 1..n - 1 {
            u[i] += half * v[i];
        }
        let th = t + half;
        let c2 = (2.0 * th).exp() / (dx * dx);
        for i in 1..n - 1 {
            lap[i] = u[i - 1] - 2.0 * u[i] + u[i + 1];
        }
        for i in 1..n - 1 {
            v[i] += dt * (c2 * lap[i] + g(i, th));
            u[i] += half * v[i];
        }
        t = if grid.t_end - t <= dt { grid.t_end } else { t + dt };
        steps += 1;
    }
    steps
}

/// Solve on `[x_min, x_max]` and return `u(·, t_end)`.
pub fn fd_solve_1d(data: &CauchyData, grid: &FdGrid) -> Result<SolutionField> {
    grid.validate()?;
    let support = data.support_radius();
    grid.check_margin(support, true)?;
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.x(i)).collect();
    let mut u: Vec<f64> = xs.iter().map(|&x| data.phi0.value(x)).collect();
    let mut v: Vec<f64> = xs.iter().map(|&x| data.phi1.value(x)).collect();
    let steps = march(&mut u, &mut v, grid, |i, t| data.source.value(xs[i], t));
    let mut field = SolutionField::new(Geometry::Line, grid.t_end, grid.x_min, grid.dx(), u);
    field.support = support.map(|r| r + grid.t_end.exp_m1());
    field.steps = Some(steps);
    Ok(field)
}

/// Radial problem on `R^3`: data and source are profiles in `r = |x|`.
///
/// `w = r u` solves the line problem on `r >= 0` with `w(0, t) = 0`, which
/// the odd extension makes exact for the three-point stencil. The grid must
/// start at `r = 0`; `u(0)` is extrapolated from the first two radii.
pub fn fd_solve_radial3d(phi0: &dyn Profile, phi1: &dyn Profile, source: &dyn Source, grid: &FdGrid) -> Result<SolutionField> {
    grid.validate()?;
    if grid.x_min != 0.0 {
        return Err(Error::Setup("radial grid must start at r = 0"));
    }
    let support = joint_support(&[phi0.support_radius(), phi1.support_radius(), source.support_radius()]);
    grid.check_margin(support, false)?;
    let rs: Vec<f64> = (0..grid.nx).map(|i| grid.x(i)).collect();
    let mut w: Vec<f64> = rs.iter().map(|&r| r * phi0.value(r)).collect();
    let mut v: Vec<f64> = rs.iter().map(|&r| r * phi1.value(r)).collect();
    let steps = march(&mut w, &mut v, grid, |i, t| rs[i] * source.value(rs[i], t));
    let mut u: Vec<f64> = w.iter().zip(&rs).map(|(w, r)| if *r > 0.0 { w / r } else { 0.0 }).collect();
    // u is even in r, so (4u(Δr) - u(2Δr))/3 = u(0) + O(Δr⁴).
    u[0] = (4.0 * u[1] - u[2]) / 3.0;
    let mut field = SolutionField::new(Geometry::Radial(3), grid.t_end, 0.0, grid.dx(), u);
    field.support = support.map(|r| r + grid.t_end.exp_m1());
    field.steps = Some(steps);
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Constant, FnProfile, FnSource, Gaussian, Steady, Zero};
    use core::f64::consts::PI;

    #[test]
    fn zero_data_stay_zero() {
        let f = fd_solve_1d(&CauchyData::initial(&Zero, &Zero), &FdGrid::new(-5.0, 5.0, 101, 1.0)).unwrap();
        assert!(f.values.iter().all(|v| *v == 0.0));
        assert!(f.steps.unwrap() > 0);
    }

    #[test]
    fn constant_source_in_the_interior() {
        let one = Steady(Constant(1.0));
        let f = fd_solve_1d(&CauchyData::source_only(&one), &FdGrid::new(-5.0, 5.0, 201, 1.0)).unwrap();
        // Boundary effects travel at most e - 1 < 2 inward.
        assert!((f.sample(0.0) - 0.5).abs() < 1e-12);
    }

    fn manufactured_error(nx: usize) -> f64 {
        // u = sin(x) cos(t) on [-π, π].
        let phi0 = FnProfile { value: |x: f64| x.sin(), derivative: |x: f64| x.cos(), support: None };
        let f = FnSource { f: |x: f64, t: f64| x.sin() * t.cos() * ((2.0 * t).exp() - 1.0), support: None };
        let t_end: f64 = 1.0;
        let field = fd_solve_1d(&CauchyData::new(&phi0, &Zero, &f), &FdGrid::new(-PI, PI, nx, t_end)).unwrap();
        (0..field.len()).map(|i| (field.values[i] - field.x(i).sin() * t_end.cos()).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn second_order_on_manufactured_solution() {
        let e: Vec<f64> = [51, 101, 201].iter().map(|&n| manufactured_error(n)).collect();
        for k in 0..2 {
            let order = (e[k] / e[k + 1]).log2();
            assert!((1.9..=2.1).contains(&order), "{e:?}");
        }
    }

    #[test]
    fn margin_is_enforced() {
        let g = Gaussian::new(4.0);
        let r = fd_solve_1d(&CauchyData::initial(&g, &Zero), &FdGrid::new(-4.0, 4.0, 401, 1.0));
        assert!(matches!(r, Err(Error::DomainTooSmall { .. })));
        let r = fd_solve_radial3d(&g, &Zero, &Zero, &FdGrid::new(0.0, 6.0, 401, 1.0));
        assert!(r.is_ok());
    }

    #[test]
    fn radial_constants() {
        let one = Constant(1.0);
        let grid = FdGrid::new(0.0, 8.0, 801, 1.0);
        let a = fd_solve_radial3d(&one, &Zero, &Zero, &grid).unwrap();
        let b = fd_solve_radial3d(&Zero, &one, &Zero, &grid).unwrap();
        for r in [0.0, 0.5, 2.0, 4.0] {
            assert!((a.sample(r) - 1.0).abs() < 1e-12, "{r} {}", a.sample(r));
            assert!((b.sample(r) - 1.0).abs() < 1e-12, "{r} {}", b.sample(r));
        }
    }
}
