//! Concrete data families: Gaussians, compactly supported bumps, smoothly
//! truncated constants, and adapters lifting profiles to radial fields and
//! steady sources.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::field::{Field, Profile, Source, SourceField};

/// Exponent beyond which a Gaussian is treated as zero (`e^{-40} ≈ 4e-18`).
const GAUSSIAN_CUTOFF: f64 = 40.0;

/// `amplitude · exp(-k (x - center)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub amplitude: f64,
    pub k: f64,
    pub center: f64,
}

impl Gaussian {
    pub fn new(k: f64) -> Self {
        Self { amplitude: 1.0, k, center: 0.0 }
    }

    /// Radius (about the center) beyond which the profile is below `e^{-40}`.
    pub fn cutoff(&self) -> f64 {
        (GAUSSIAN_CUTOFF / self.k).sqrt()
    }
}

impl Profile for Gaussian {
    fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude * (-self.k * d * d).exp()
    }
    fn derivative(&self, x: f64) -> f64 {
        let d = x - self.center;
        -2.0 * self.k * d * self.value(x)
    }
    fn support_radius(&self) -> Option<f64> {
        Some(self.center.abs() + self.cutoff())
    }
}

/// The `C^∞` bump `amplitude · exp(1 - 1/(1 - (x/R)²))`, supported in `|x| < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub radius: f64,
}

impl Bump {
    pub fn new(radius: f64) -> Self {
        Self { amplitude: 1.0, radius }
    }
}

impl Profile for Bump {
    fn value(&self, x: f64) -> f64 {
        let s = x / self.radius;
        let g = 1.0 - s * s;
        if g <= 0.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - 1.0 / g).exp()
    }
    fn derivative(&self, x: f64) -> f64 {
        let s = x / self.radius;
        let g = 1.0 - s * s;
        if g <= 0.0 {
            return 0.0;
        }
        self.value(x) * (-2.0 * s / self.radius) / (g * g)
    }
    fn support_radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}

/// A constant without support bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Profile for Constant {
    fn value(&self, _: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _: f64) -> f64 {
        0.0
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Zero;

impl Profile for Zero {
    fn value(&self, _: f64) -> f64 {
        0.0
    }
    fn derivative(&self, _: f64) -> f64 {
        0.0
    }
    fn support_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

impl Source for Zero {
    fn value(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn support_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

impl<const N: usize> Field<N> for Zero {
    fn value(&self, _: [f64; N]) -> f64 {
        0.0
    }
    fn gradient(&self, _: [f64; N]) -> [f64; N] {
        [0.0; N]
    }
    fn support_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

impl<const N: usize> SourceField<N> for Zero {
    fn value(&self, _: [f64; N], _: f64) -> f64 {
        0.0
    }
    fn gradient(&self, _: [f64; N], _: f64) -> [f64; N] {
        [0.0; N]
    }
    fn support_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `level` on `|x| <= radius`, tapering smoothly to zero on `[radius, radius + width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub level: f64,
    pub radius: f64,
    pub width: f64,
}

fn smooth_step(s: f64) -> (f64, f64) {
    // (S, S') with S = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}).
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    let da = a / (s * s);
    let db = -b / ((1.0 - s) * (1.0 - s));
    let den = a + b;
    (a / den, (da * den - a * (da + db)) / (den * den))
}

impl Profile for Plateau {
    fn value(&self, x: f64) -> f64 {
        let (s, _) = smooth_step((x.abs() - self.radius) / self.width);
        self.level * (1.0 - s)
    }
    fn derivative(&self, x: f64) -> f64 {
        let (_, ds) = smooth_step((x.abs() - self.radius) / self.width);
        -self.level * ds / self.width * x.signum()
    }
    fn support_radius(&self) -> Option<f64> {
        Some(self.radius + self.width)
    }
}

/// A profile given by closures.
pub struct FnProfile<F, D> {
    pub value: F,
    pub derivative: D,
    pub support: Option<f64>,
}

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> Profile for FnProfile<F, D> {
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.support
    }
}

/// A linear combination of profiles.
pub struct Combination<'a> {
    pub terms: Vec<(f64, &'a dyn Profile)>,
}

impl Profile for Combination<'_> {
    fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.value(x)).sum()
    }
    fn derivative(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.derivative(x)).sum()
    }
    fn support_radius(&self) -> Option<f64> {
        self.terms.iter().try_fold(0.0f64, |acc, (_, p)| p.support_radius().map(|r| acc.max(r)))
    }
}

/// Odd lift `r ↦ r·p(|r|)`: for radial data on `R^3`, `w = r u` solves the
/// line problem with this data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddLift<P>(pub P);

impl<P: Profile> Profile for OddLift<P> {
    fn value(&self, x: f64) -> f64 {
        x * self.0.value(x.abs())
    }
    fn derivative(&self, x: f64) -> f64 {
        self.0.value(x.abs()) + x.abs() * self.0.derivative(x.abs())
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

impl<P: Profile> Source for OddLift<P> {
    fn value(&self, x: f64, _: f64) -> f64 {
        Profile::value(self, x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

/// Radial field `x ↦ p(|x|)` on `R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial<P>(pub P);

fn norm<const N: usize>(x: &[f64; N]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl<const N: usize, P: Profile> Field<N> for Radial<P> {
    fn value(&self, x: [f64; N]) -> f64 {
        self.0.value(norm(&x))
    }
    fn gradient(&self, x: [f64; N]) -> [f64; N] {
        let r = norm(&x);
        if r == 0.0 {
            return [0.0; N];
        }
        let d = self.0.derivative(r) / r;
        x.map(|v| v * d)
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

/// Time-independent source `f(x, t) = g(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steady<G>(pub G);

impl<P: Profile> Source for Steady<P> {
    fn value(&self, x: f64, _: f64) -> f64 {
        self.0.value(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

impl<const N: usize, F: Field<N>> SourceField<N> for Steady<F> {
    fn value(&self, x: [f64; N], _: f64) -> f64 {
        self.0.value(x)
    }
    fn gradient(&self, x: [f64; N], _: f64) -> [f64; N] {
        self.0.gradient(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.0.support_radius()
    }
}

/// A line source given by a closure.
pub struct FnSource<F> {
    pub f: F,
    pub support: Option<f64>,
}

impl<F: Fn(f64, f64) -> f64> Source for FnSource<F> {
    fn value(&self, x: f64, t: f64) -> f64 {
        (self.f)(x, t)
    }
    fn support_radius(&self) -> Option<f64> {
        self.support
    }
}

/// A field on `R^N` given by closures.
pub struct FnField<F, G> {
    pub value: F,
    pub gradient: G,
    pub support: Option<f64>,
}

impl<const N: usize, F: Fn([f64; N]) -> f64, G: Fn([f64; N]) -> [f64; N]> Field<N> for FnField<F, G> {
    fn value(&self, x: [f64; N]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: [f64; N]) -> [f64; N] {
        (self.gradient)(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.support
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gradient_consistent;

    const PROBES: [f64; 9] = [-1.3, -0.7, -0.31, -0.05, 0.0, 0.12, 0.44, 0.9, 1.6];

    #[test]
    fn derivatives_are_consistent() {
        assert!(gradient_consistent(&Gaussian::new(4.0), &PROBES));
        assert!(gradient_consistent(&Gaussian { amplitude: 2.0, k: 1.5, center: 0.3 }, &PROBES));
        assert!(gradient_consistent(&Bump::new(1.0), &[-0.8, -0.3, 0.0, 0.2, 0.7]));
        let p = Plateau { level: 1.0, radius: 0.5, width: 1.0 };
        assert!(gradient_consistent(&p, &[-1.2, -0.9, 0.0, 0.7, 1.1, 1.4]));
        assert!(gradient_consistent(&OddLift(Gaussian::new(2.0)), &PROBES));
    }

    #[test]
    fn supports() {
        assert_eq!(Bump::new(0.5).value(0.5), 0.0);
        assert_eq!(Bump::new(0.5).value(0.0), 1.0);
        let p = Plateau { level: 2.0, radius: 1.0, width: 0.5 };
        assert_eq!(p.value(0.9), 2.0);
        assert_eq!(p.value(1.6), 0.0);
        let g = Gaussian::new(4.0);
        let r = g.support_radius().unwrap();
        assert!(g.value(r) < 1e-17);
    }

    #[test]
    fn radial_gradient() {
        let f = Radial(Gaussian::new(1.0));
        let x = [0.3, -0.4, 1.2];
        let g = f.gradient(x);
        let v = f.value(x);
        for i in 0..3 {
            assert!((g[i] + 2.0 * x[i] * v).abs() < 1e-15);
        }
        assert_eq!(Field::<3>::gradient(&f, [0.0; 3]), [0.0; 3]);
    }
}
