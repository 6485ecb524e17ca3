//! `(-Δ)^{-s}` on sampled fields through the Fourier multiplier `|ξ|^{-2s}`
//! on a periodic grid.
//!
//! Radial fields are reduced to one dimension: on `R^3` the odd lift `r u`
//! carries the same multiplier, and on `R^2` the Abel projection does (the
//! projection of a radial function has the central slice of its transform
//! as its own transform). Periodisation handles zero-mass data well; the
//! mass is therefore carried by a Gaussian whose potential is known in
//! closed form, and only the zero-mass remainder goes through the FFT.

use std::f64::consts::PI;

use desitter_core::field::{sphere_area, Geometry, SolutionField};
use desitter_core::special::{gamma, kummer_neg};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Gaussian width of the mass carrier: `exp(-a r²)` with `a R² = 40` at the
/// support radius `R`.
const CARRIER_EXPONENT: f64 = 40.0;

/// Signed wavenumbers of an `n`-point periodic grid of the given period.
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    let base = 2.0 * PI / period;
    (0..n).map(|j| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 } * base).collect()
}

/// Apply the Fourier multiplier `symbol(k)` to periodic samples; the real
/// part of the result is returned. The symbol is not evaluated at the
/// Nyquist wavenumber of an even grid, where it is replaced by its real part.
pub fn periodic_multiplier<F: Fn(f64) -> Complex64>(values: &[f64], period: f64, symbol: F) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, (c, k)) in buf.iter_mut().zip(wavenumbers(n, period)).enumerate() {
        let m = symbol(k);
        *c *= if n % 2 == 0 && j == n / 2 { Complex64::new(m.re, 0.0) } else { m };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// `|k|^{-2s}` with the zero mode removed (`s > 0`).
pub fn riesz_symbol(s: f64) -> impl Fn(f64) -> Complex64 {
    move |k: f64| {
        if s == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(k.abs().powf(-2.0 * s), 0.0)
        }
    }
}

/// `(-Δ)^{-s} exp(-a|x|²)` on `R^n` at radius `r`:
/// `Γ(n/2 - s) / Γ(n/2) · (4a)^{-s} · M(n/2 - s, n/2, -a r²)`.
pub fn riesz_gaussian(n: usize, s: f64, a: f64, r: f64) -> Result<f64> {
    let h = n as f64 / 2.0;
    if !(s >= 0.0 && 2.0 * s < n as f64) {
        return Err(Error::validation(format!("Riesz potential needs 0 <= 2s < n, got s = {s}, n = {n}")));
    }
    if !(a > 0.0) {
        return Err(Error::validation("Gaussian exponent must be positive"));
    }
    Ok(gamma(h - s) / gamma(h) * (4.0 * a).powf(-s) * kummer_neg(h - s, h, a * r * r)?)
}

/// Abel projection `P f(x) = 2 ∫_x^∞ f(r) r / sqrt(r² - x²) dr` of a radial
/// profile sampled at `r_i = i h` (zero beyond the last sample), evaluated at
/// `x_j = j h` for `j < m`. The profile is taken piecewise linear and each
/// cell is integrated exactly.
pub fn abel_project(profile: &[f64], h: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let x = j as f64 * h;
            let x2 = x * x;
            let mut acc = 0.0;
            for i in j..profile.len().saturating_sub(1) {
                let (r1, r2) = (i as f64 * h, (i + 1) as f64 * h);
                let beta = (profile[i + 1] - profile[i]) / h;
                let alpha = profile[i] - beta * r1;
                let s1 = (r1 * r1 - x2).max(0.0).sqrt();
                let s2 = (r2 * r2 - x2).sqrt();
                let log = if x > 0.0 { x2 * ((r2 + s2) / (r1 + s1)).ln() } else { 0.0 };
                acc += alpha * (s2 - s1) + 0.5 * beta * (r2 * s2 - r1 * s1 + log);
            }
            2.0 * acc
        })
        .collect()
}

/// Invert the Abel projection from its derivative: with `g = P f`,
/// `f(r) = -(1/π) ∫_r^∞ g'(x) / sqrt(x² - r²) dx`. `dg` holds `g'` at
/// `x_i = i h` (odd, so `dg[0]` is ignored); the result is `f` at `r_j = j h`
/// for `j < m`.
pub fn abel_invert_derivative(dg: &[f64], h: f64, m: usize) -> Vec<f64> {
    let last = dg.len().saturating_sub(1);
    (0..m)
        .map(|j| {
            let r = j as f64 * h;
            let r2 = r * r;
            let mut acc = 0.0;
            for i in j..last {
                let (x1, x2) = (i as f64 * h, (i + 1) as f64 * h);
                let beta = (dg[i + 1] - dg[i]) / h;
                let alpha = dg[i] - beta * x1;
                if j == 0 {
                    // ∫ g'(x)/x dx; g' vanishes linearly at the origin.
                    acc += if i == 0 { dg[1] } else { alpha * (x2 / x1).ln() + beta * h };
                    continue;
                }
                let s1 = (x1 * x1 - r2).max(0.0).sqrt();
                let s2 = (x2 * x2 - r2).sqrt();
                acc += alpha * ((x2 + s2) / (x1 + s1)).ln() + beta * (s2 - s1);
            }
            -acc / PI
        })
        .collect()
}

/// Recover a radial profile on `R^2` from its Abel projection sampled on an
/// even line field; `g'` is taken by fourth-order differences.
pub fn inverse_abel(projection: &SolutionField) -> Result<SolutionField> {
    if projection.geometry != Geometry::Line {
        return Err(Error::validation("inverse Abel transform needs a line field"));
    }
    let h = projection.dx;
    let m = (projection.x_max() / h).floor() as usize + 1;
    if m < 8 || projection.x0 > -(m as f64 - 1.0) * h {
        return Err(Error::validation("projection must be sampled symmetrically about the origin"));
    }
    let g: Vec<f64> = (0..m + 2).map(|i| projection.sample(i as f64 * h)).collect();
    let dg: Vec<f64> = (0..m)
        .map(|i| {
            let at = |k: isize| g[(i as isize + k).unsigned_abs()];
            if i + 2 >= g.len() {
                return 0.0;
            }
            (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)
        })
        .collect();
    let mut out = SolutionField::new(Geometry::Radial(2), projection.t, 0.0, h, abel_invert_derivative(&dg, h, m));
    out.support = projection.support;
    Ok(out)
}

/// Four-point Lagrange interpolation of a sampled field; zero outside the
/// window. Radial fields are continued evenly through `r = 0`.
pub fn sample_cubic(field: &SolutionField, x: f64) -> f64 {
    let n = field.len();
    let s = (x - field.x0) / field.dx;
    if n < 4 || s < 0.0 || s > (n - 1) as f64 {
        return 0.0;
    }
    let even = field.geometry != Geometry::Line && field.x0 == 0.0;
    let i = (s.floor() as isize).clamp(if even { 0 } else { 1 }, n as isize - 3);
    let at = |k: isize| {
        let k = if even { k.abs() } else { k };
        field.values[k as usize]
    };
    let u = s - i as f64;
    let w = [-u * (u - 1.0) * (u - 2.0) / 6.0, (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0, -(u + 1.0) * u * (u - 2.0) / 2.0, (u + 1.0) * u * (u - 1.0) / 6.0];
    (0..4).map(|k| w[k] * at(i - 1 + k as isize)).sum()
}

/// `∫ u dx` over `R^n` by the trapezoid rule on the sample window.
pub fn field_mass(field: &SolutionField) -> f64 {
    let last = field.len().saturating_sub(1);
    let mut sum = 0.0;
    for (i, v) in field.values.iter().enumerate() {
        let mut w = if i == 0 || i == last { 0.5 } else { 1.0 };
        if let Geometry::Radial(n) = field.geometry {
            w *= sphere_area(n) * field.x(i).abs().powi(n as i32 - 1);
        }
        sum += w * v;
    }
    sum * field.dx
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracOutcome {
    /// `(-Δ)^{-s} u` on the periodic grid (radial fields: on `[0, L)`).
    pub field: SolutionField,
    /// Mass of the input field.
    pub mass: f64,
    /// Whether the mass was carried by the closed-form Gaussian potential.
    pub mass_corrected: bool,
}

fn dimension(g: Geometry) -> Result<usize> {
    match g {
        Geometry::Line | Geometry::Radial(1) => Ok(1),
        Geometry::Radial(n @ (2 | 3)) => Ok(n),
        Geometry::Radial(n) => Err(desitter_core::Error::UnsupportedDimension(n).into()),
    }
}

/// `(-Δ)^{-s} u` with `u` periodised on `[-L, L)^n` and sampled at `n_points`
/// points per axis. The field must vanish beyond a quarter of the period
/// (`L` at least four times its support radius, or its window when it
/// declares none).
pub fn frac_laplacian_neg_s(field: &SolutionField, s: f64, half_width: f64, n_points: usize) -> Result<FracOutcome> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::validation(format!("order s must be finite and >= 0, got {s}")));
    }
    if n_points < 16 || n_points % 2 != 0 {
        return Err(Error::validation("periodic grid needs an even number (>= 16) of points"));
    }
    let n = dimension(field.geometry)?;
    let reach = field.support.unwrap_or_else(|| field.x0.abs().max(field.x_max().abs()));
    if !(half_width >= 4.0 * reach) {
        return Err(Error::validation(format!("half width {half_width} is below four times the support radius {reach}")));
    }
    let mass = field_mass(field);
    if s == 0.0 {
        return Ok(FracOutcome { field: field.clone(), mass, mass_corrected: false });
    }
    let scale = field.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) * reach.max(field.dx).powi(n as i32);
    let corrected = mass.abs() > 1e-13 * scale;
    if corrected && 2.0 * s >= n as f64 {
        return Err(Error::IllPosed { s, n, mass });
    }
    let a = CARRIER_EXPONENT / reach.max(field.dx).powi(2);
    let norm = (a / PI).powf(n as f64 / 2.0);
    let carrier = |r: f64| if corrected { mass * norm * (-a * r * r).exp() } else { 0.0 };
    let potential = |r: f64| -> Result<f64> {
        if corrected {
            Ok(mass * norm * riesz_gaussian(n, s, a, r)?)
        } else {
            Ok(0.0)
        }
    };

    let h = 2.0 * half_width / n_points as f64;
    let period = 2.0 * half_width;
    let half = n_points / 2;
    let x = |j: usize| -half_width + j as f64 * h;
    let profile = |r: f64| sample_cubic(field, r) - carrier(r);

    let out = match field.geometry {
        Geometry::Line | Geometry::Radial(1) => {
            let radial = field.geometry != Geometry::Line;
            let sample = |xj: f64| if radial { profile(xj.abs()) } else { sample_cubic(field, xj) - carrier(xj) };
            let vals: Vec<f64> = (0..n_points).map(|j| sample(x(j))).collect();
            let res = periodic_multiplier(&vals, period, riesz_symbol(s));
            if radial {
                let v = (0..half).map(|j| Ok(res[half + j] + potential(j as f64 * h)?)).collect::<Result<Vec<_>>>()?;
                SolutionField::new(field.geometry, field.t, 0.0, h, v)
            } else {
                let v = (0..n_points).map(|j| Ok(res[j] + potential(x(j))?)).collect::<Result<Vec<_>>>()?;
                SolutionField::new(Geometry::Line, field.t, -half_width, h, v)
            }
        }
        Geometry::Radial(3) => {
            let w: Vec<f64> = (0..n_points).map(|j| x(j) * profile(x(j).abs())).collect();
            let ws = periodic_multiplier(&w, period, riesz_symbol(s));
            let mut v = vec![0.0; half];
            for j in 1..half {
                v[j] = ws[half + j] / (j as f64 * h);
            }
            // Even in r: (4u(h) - u(2h))/3 = u(0) + O(h⁴).
            v[0] = (4.0 * v[1] - v[2]) / 3.0;
            for (j, vj) in v.iter_mut().enumerate() {
                *vj += potential(j as f64 * h)?;
            }
            SolutionField::new(field.geometry, field.t, 0.0, h, v)
        }
        Geometry::Radial(_) => {
            let f: Vec<f64> = (0..=half).map(|i| profile(i as f64 * h)).collect();
            let g = abel_project(&f, h, half + 1);
            let periodic: Vec<f64> = (0..n_points).map(|j| g[(j as isize - half as isize).unsigned_abs()]).collect();
            let ds = move |k: f64| Complex64::new(0.0, k) * riesz_symbol(s)(k);
            let dg_all = periodic_multiplier(&periodic, period, ds);
            let dg: Vec<f64> = (0..half).map(|j| dg_all[half + j]).collect();
            let mut v = abel_invert_derivative(&dg, h, half);
            for (j, vj) in v.iter_mut().enumerate() {
                *vj += potential(j as f64 * h)?;
            }
            SolutionField::new(field.geometry, field.t, 0.0, h, v)
        }
    };
    Ok(FracOutcome { field: out, mass, mass_corrected: corrected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use desitter_core::quad::{tanh_sinh_nodes, QuadratureConfig};

    fn line(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> f64) -> SolutionField {
        SolutionField::new(Geometry::Line, 0.0, x0, dx, (0..n).map(|i| f(x0 + dx * i as f64)).collect())
    }

    fn radial(n: usize, dr: f64, len: usize, f: impl Fn(f64) -> f64) -> SolutionField {
        SolutionField::new(Geometry::Radial(n), 0.0, 0.0, dr, (0..len).map(|i| f(dr * i as f64)).collect())
    }

    #[test]
    fn single_modes_are_eigenfunctions() {
        let n = 64;
        let period = 2.0 * PI;
        for m in [1usize, 3, 7] {
            let v: Vec<f64> = (0..n).map(|j| (m as f64 * period * j as f64 / n as f64).sin()).collect();
            let out = periodic_multiplier(&v, period, riesz_symbol(0.3));
            let scale = (m as f64).powf(-0.6);
            for j in 0..n {
                assert!((out[j] - scale * v[j]).abs() < 1e-14, "{m} {j}");
            }
        }
    }

    #[test]
    fn commutes_with_grid_shifts() {
        let n = 128;
        let v: Vec<f64> = (0..n).map(|j| (-((j as f64 - 40.0) / 6.0).powi(2)).exp()).collect();
        let base = periodic_multiplier(&v, 10.0, riesz_symbol(0.4));
        for shift in [1usize, 17, 64] {
            let rotated: Vec<f64> = (0..n).map(|j| v[(j + n - shift) % n]).collect();
            let out = periodic_multiplier(&rotated, 10.0, riesz_symbol(0.4));
            for j in 0..n {
                assert!((out[j] - base[(j + n - shift) % n]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn order_zero_is_identity() {
        let f = line(-2.0, 0.1, 41, |x| (-x * x).exp());
        let out = frac_laplacian_neg_s(&f, 0.0, 8.0, 64).unwrap();
        assert_eq!(out.field, f);
    }

    /// `c ∫ |x - y|^{2s-1} e^{-y²} dy` with `c = Γ(1/2 - s) / (4^s √π Γ(s))`.
    fn riesz_quadrature(s: f64, x: f64) -> f64 {
        let cfg = QuadratureConfig::double_exponential(1e-14, 1e-12);
        let c = gamma(0.5 - s) / (4f64.powf(s) * PI.sqrt() * gamma(s));
        let left = tanh_sinh_nodes(|n| n.from_b.powf(2.0 * s - 1.0) * (-n.x * n.x).exp(), x - 8.0, x, &cfg).unwrap().value;
        let right = tanh_sinh_nodes(|n| n.from_a.powf(2.0 * s - 1.0) * (-n.x * n.x).exp(), x, x + 8.0, &cfg).unwrap().value;
        c * (left + right)
    }

    #[test]
    fn gaussian_potential_matches_direct_quadrature() {
        let s = 0.25;
        let f = line(-7.0, 0.01, 1401, |x| (-x * x).exp());
        let out = frac_laplacian_neg_s(&f, s, 28.0, 8192).unwrap();
        assert!(out.mass_corrected);
        for x in [0.0, 0.7, 2.5] {
            let oracle = riesz_quadrature(s, x);
            let closed = riesz_gaussian(1, s, 1.0, x).unwrap();
            assert!((closed - oracle).abs() < 1e-10, "{x} {closed} {oracle}");
            assert!((sample_cubic(&out.field, x) - oracle).abs() < 1e-3 * oracle, "{x} {} {oracle}", sample_cubic(&out.field, x));
        }
    }

    #[test]
    fn zero_mass_data_need_no_carrier() {
        // The multiplier commutes with d²/dx².
        let s = 0.3;
        let f = line(-7.0, 0.01, 1401, |x| (4.0 * x * x - 2.0) * (-x * x).exp());
        // Zero-mass remainders still see their periodic images; widen the period.
        let out = frac_laplacian_neg_s(&f, s, 112.0, 32768).unwrap();
        assert!(!out.mass_corrected);
        for x in [0.4, 1.3] {
            let h = 1e-3;
            let p = |y: f64| riesz_gaussian(1, s, 1.0, y).unwrap();
            let d = (p(x + h) - 2.0 * p(x) + p(x - h)) / (h * h);
            assert!((sample_cubic(&out.field, x) - d).abs() < 1e-4, "{x} {} {d}", sample_cubic(&out.field, x));
        }
    }

    #[test]
    fn abel_pair_on_gaussians() {
        // P e^{-r²} = √π e^{-x²}.
        let h = 0.01;
        let f: Vec<f64> = (0..800).map(|i| (-(i as f64 * h).powi(2)).exp()).collect();
        let g = abel_project(&f, h, 400);
        for j in [0usize, 50, 150] {
            let x = j as f64 * h;
            assert!((g[j] - PI.sqrt() * (-x * x).exp()).abs() < 1e-4, "{j}");
        }
        let dg: Vec<f64> = (0..800).map(|i| {
            let x = i as f64 * h;
            -2.0 * x * PI.sqrt() * (-x * x).exp()
        }).collect();
        let back = abel_invert_derivative(&dg, h, 400);
        for j in [0usize, 1, 50, 150] {
            let r = j as f64 * h;
            assert!((back[j] - (-r * r).exp()).abs() < 1e-4, "{j} {}", back[j]);
        }
    }

    #[test]
    fn radial_potentials_match_closed_forms() {
        for (n, s) in [(3usize, 0.6), (2, 0.45)] {
            let f = radial(n, 0.01, 701, |r| (-r * r).exp());
            let out = frac_laplacian_neg_s(&f, s, 28.0, 8192).unwrap();
            let mass = PI.powf(n as f64 / 2.0);
            assert!((out.mass - mass).abs() < 1e-4 * mass, "{} {mass}", out.mass);
            for r in [0.0, 0.5, 2.0] {
                let exact = riesz_gaussian(n, s, 1.0, r).unwrap();
                assert!((sample_cubic(&out.field, r) - exact).abs() < 1e-3 * exact, "n {n} r {r} {} {exact}", sample_cubic(&out.field, r));
            }
        }
    }

    #[test]
    fn carrier_is_exact_for_a_matching_gaussian() {
        // With the carrier width equal to the data width the remainder is zero.
        let n = 3;
        let r_support = (CARRIER_EXPONENT).sqrt();
        let mut f = radial(n, 0.01, 701, |r| (-r * r).exp());
        f.support = Some(r_support);
        let out = frac_laplacian_neg_s(&f, 0.5, 4.0 * r_support, 4096).unwrap();
        for r in [0.0, 1.0] {
            let exact = riesz_gaussian(n, 0.5, 1.0, r).unwrap();
            assert!((sample_cubic(&out.field, r) - exact).abs() < 1e-6, "{r} {} {exact}", sample_cubic(&out.field, r));
        }
    }

    #[test]
    fn nonzero_mass_beyond_the_riesz_range_is_rejected() {
        let f = line(-5.0, 0.01, 1001, |x| (-x * x).exp());
        assert!(matches!(frac_laplacian_neg_s(&f, 0.5, 20.0, 4096), Err(Error::IllPosed { .. })));
        assert!(frac_laplacian_neg_s(&f, 0.3, 10.0, 4096).is_err());
    }

    #[test]
    fn inverse_abel_of_a_sampled_projection() {
        let g = line(-8.0, 0.01, 1601, |x| PI.sqrt() * (-x * x).exp());
        let f = inverse_abel(&g).unwrap();
        for r in [0.0, 0.3, 1.5] {
            assert!((sample_cubic(&f, r) - (-r * r).exp()).abs() < 1e-4, "{r}");
        }
    }
}
