//! Evaluable data fields and sampled solutions.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// A function of one variable with its derivative, e.g. Cauchy data on the line.
pub trait Profile {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    /// The function vanishes for `|x| > radius`; `None` if unbounded.
    fn support_radius(&self) -> Option<f64> {
        None
    }
}

/// A function on `R^N` with its gradient.
pub trait Field<const N: usize> {
    fn value(&self, x: [f64; N]) -> f64;
    fn gradient(&self, x: [f64; N]) -> [f64; N];
    fn support_radius(&self) -> Option<f64> {
        None
    }
}

/// A source term `f(x, t)` on the line.
pub trait Source {
    fn value(&self, x: f64, t: f64) -> f64;
    /// Support radius in `x`, uniform in `t`.
    fn support_radius(&self) -> Option<f64> {
        None
    }
}

/// A source term `f(x, t)` on `R^N` with its spatial gradient.
pub trait SourceField<const N: usize> {
    fn value(&self, x: [f64; N], t: f64) -> f64;
    fn gradient(&self, x: [f64; N], t: f64) -> [f64; N];
    fn support_radius(&self) -> Option<f64> {
        None
    }
}

impl<P: Profile + ?Sized> Profile for &P {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (**self).derivative(x)
    }
    fn support_radius(&self) -> Option<f64> {
        (**self).support_radius()
    }
}

impl<const N: usize, F: Field<N> + ?Sized> Field<N> for &F {
    fn value(&self, x: [f64; N]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: [f64; N]) -> [f64; N] {
        (**self).gradient(x)
    }
    fn support_radius(&self) -> Option<f64> {
        (**self).support_radius()
    }
}

impl<S: Source + ?Sized> Source for &S {
    fn value(&self, x: f64, t: f64) -> f64 {
        (**self).value(x, t)
    }
    fn support_radius(&self) -> Option<f64> {
        (**self).support_radius()
    }
}

impl<const N: usize, S: SourceField<N> + ?Sized> SourceField<N> for &S {
    fn value(&self, x: [f64; N], t: f64) -> f64 {
        (**self).value(x, t)
    }
    fn gradient(&self, x: [f64; N], t: f64) -> [f64; N] {
        (**self).gradient(x, t)
    }
    fn support_radius(&self) -> Option<f64> {
        (**self).support_radius()
    }
}

/// Largest of several support radii; unbounded if any is.
pub fn joint_support(radii: &[Option<f64>]) -> Option<f64> {
    radii.iter().try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
}

/// Whether the supplied derivative matches a central difference of the
/// value to `1e-6` (relative, with an absolute floor) at every probe.
pub fn gradient_consistent<P: Profile + ?Sized>(p: &P, probes: &[f64]) -> bool {
    probes.iter().all(|&x| {
        let h = 1e-5 * x.abs().max(1.0);
        let fd = (p.value(x - 2.0 * h) - 8.0 * p.value(x - h) + 8.0 * p.value(x + h) - p.value(x + 2.0 * h))
            / (12.0 * h);
        let d = p.derivative(x);
        (fd - d).abs() <= 1e-6 * d.abs().max(1e-3)
    })
}

/// Geometry of a sampled solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Samples on a line.
    Line,
    /// Radial profile of a function on `R^n`; samples start at `r = x0 >= 0`.
    Radial(usize),
}

/// A solution sampled on a uniform grid at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub geometry: Geometry,
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
    /// Radius outside which the solution is known to vanish, if any.
    pub support: Option<f64>,
    /// Time steps taken, for fields produced by time stepping.
    pub steps: Option<usize>,
}

impl SolutionField {
    pub fn new(geometry: Geometry, t: f64, x0: f64, dx: f64, values: Vec<f64>) -> Self {
        Self { geometry, t, x0, dx, values, support: None, steps: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.values.len().saturating_sub(1))
    }

    /// Linear interpolation; zero outside the window.
    pub fn sample(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.dx;
        if s < 0.0 || self.values.is_empty() || s > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (s.floor() as usize).min(self.values.len() - 1);
        if i + 1 >= self.values.len() {
            return self.values[i];
        }
        let w = s - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// `‖u‖_q` by the trapezoid rule over the window, `q = ∞` as max.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::Domain { what: "Lebesgue exponent", value: q });
        }
        if self.values.len() < 2 || !(self.dx > 0.0) {
            return Err(Error::Setup("field needs at least two samples"));
        }
        if let Some(r) = self.support {
            let covered = match self.geometry {
                Geometry::Line => self.x0 <= -r && self.x_max() >= r,
                Geometry::Radial(_) => self.x0 <= 0.0 && self.x_max() >= r,
            };
            if !covered {
                return Err(Error::Coverage { lo: self.x0, hi: self.x_max(), support: r });
            }
        }
        if q.is_infinite() {
            return Ok(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let last = self.values.len() - 1;
        let mut sum = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let mut w = if i == 0 || i == last { 0.5 } else { 1.0 };
            if let Geometry::Radial(n) = self.geometry {
                w *= sphere_area(n) * self.x(i).abs().powi(n as i32 - 1);
            }
            sum += w * v.abs().powf(q);
        }
        Ok((sum * self.dx).powf(1.0 / q))
    }
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    use core::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(n as f64 / 2.0) / crate::special::gamma(n as f64 / 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(x0: f64, x1: f64, n: usize, f: impl Fn(f64) -> f64) -> SolutionField {
        let dx = (x1 - x0) / (n - 1) as f64;
        SolutionField::new(Geometry::Line, 0.0, x0, dx, (0..n).map(|i| f(x0 + dx * i as f64)).collect())
    }

    #[test]
    fn norms_of_simple_fields() {
        let one = line(0.0, 1.0, 101, |_| 1.0);
        assert!((one.lq_norm(2.0).unwrap() - 1.0).abs() < 1e-14);
        let ramp = line(0.0, 1.0, 2001, |x| x);
        assert!((ramp.lq_norm(2.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
        let g = line(-6.0, 6.0, 1201, |x| (-x * x).exp());
        assert_eq!(g.lq_norm(f64::INFINITY).unwrap(), 1.0);
        // ∫ e^{-2x²} = sqrt(π/2)
        let expect = (core::f64::consts::PI / 2.0).sqrt().sqrt();
        assert!((g.lq_norm(2.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn radial_norm_of_gaussian() {
        // ∫_{R^3} e^{-2|x|²} = (π/2)^{3/2}
        let n = 2001;
        let dx = 8.0 / (n - 1) as f64;
        let f = SolutionField::new(
            Geometry::Radial(3),
            0.0,
            0.0,
            dx,
            (0..n).map(|i| (-(dx * i as f64).powi(2)).exp()).collect(),
        );
        let expect = (core::f64::consts::PI / 2.0).powf(0.75);
        assert!((f.lq_norm(2.0).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn coverage_is_checked() {
        let mut f = line(-1.0, 1.0, 11, |_| 0.0);
        f.support = Some(2.0);
        assert!(matches!(f.lq_norm(2.0), Err(Error::Coverage { .. })));
        assert!(matches!(f.lq_norm(0.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn sampling_interpolates() {
        let f = SolutionField::new(Geometry::Line, 0.0, 0.0, 1.0, vec![0.0, 2.0, 4.0]);
        assert_eq!(f.sample(0.5), 1.0);
        assert_eq!(f.sample(2.0), 4.0);
        assert_eq!(f.sample(-0.1), 0.0);
        assert_eq!(f.sample(3.0), 0.0);
    }

    #[test]
    fn joint_support_rules() {
        assert_eq!(joint_support(&[Some(1.0), Some(3.0)]), Some(3.0));
        assert_eq!(joint_support(&[Some(1.0), None]), None);
        assert_eq!(joint_support(&[]), Some(0.0));
    }
}
