//! Closed-form identities satisfied by the propagator, evaluated numerically
//! on random admissible points. Derivatives use fourth-order differences:
//! central where the stencil fits in the cone, one-sided from the interior
//! on the light cone itself.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{propagator_e, ConeQuery};
use crate::special::{hyp_pair, HyperArg};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    /// Translation invariance in the source point.
    E1,
    /// Evenness in `x`.
    E2,
    /// Value on the cone through `b = ln(e^t - x)`.
    E2a,
    /// `∂_b(e^b E(e^b - e^t, t; 0, b))`.
    E3a,
    /// `∂_b(b e^b E(e^t - e^b, t; 0, b))`.
    E4,
    /// `∂_x E` on the left edge of the cone.
    E5,
    /// `∂_x E` on the right edge of the cone.
    E6,
    /// `∂_b E` at the `b` putting `x` on the cone.
    E7,
    /// `∂_b E(z, t; 0, b)` at `b = 0` against its bracket formula.
    Bzt00,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::E1,
        IdentityId::E2,
        IdentityId::E2a,
        IdentityId::E3a,
        IdentityId::E4,
        IdentityId::E5,
        IdentityId::E6,
        IdentityId::E7,
        IdentityId::Bzt00,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            IdentityId::E1 => "E_1",
            IdentityId::E2 => "E_2",
            IdentityId::E2a => "E_2a",
            IdentityId::E3a => "E_3a",
            IdentityId::E4 => "E_4",
            IdentityId::E5 => "E_5",
            IdentityId::E6 => "E_6",
            IdentityId::E7 => "E_7",
            IdentityId::Bzt00 => "E_bzt00",
        }
    }
}

/// Sample point; which coordinates matter depends on the identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerPoint {
    pub t: f64,
    pub x: f64,
    pub b: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub id: IdentityId,
    pub point: LedgerPoint,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LedgerReport {
    pub rows: Vec<LedgerRow>,
}

impl LedgerReport {
    /// Largest absolute discrepancy for one identity (0 if it has no rows).
    pub fn max_abs_err(&self, id: IdentityId) -> f64 {
        self.rows.iter().filter(|r| r.id == id).fold(0.0, |m, r| m.max(r.abs_err))
    }
}

fn e(x: f64, t: f64, b: f64) -> Result<f64> {
    Ok(propagator_e(&ConeQuery::new(x, t, 0.0, b))?.value)
}

fn step(scale: f64) -> f64 {
    1e-5 * scale.abs().max(1.0)
}

fn central<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

/// Fourth-order one-sided difference; `h < 0` differences from the left.
fn one_sided<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    let v = [f(x)?, f(x + h)?, f(x + 2.0 * h)?, f(x + 3.0 * h)?, f(x + 4.0 * h)?];
    Ok((-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h))
}

/// Both sides of one identity at one point.
pub fn evaluate_identity(id: IdentityId, p: &LedgerPoint) -> Result<(f64, f64)> {
    let t = p.t;
    let et = t.exp();
    match id {
        IdentityId::E1 => {
            let lhs = propagator_e(&ConeQuery::new(p.x, t, p.y, p.b))?.value;
            Ok((lhs, e(p.x - p.y, t, p.b)?))
        }
        IdentityId::E2 => Ok((e(p.x, t, p.b)?, e(-p.x, t, p.b)?)),
        IdentityId::E2a => {
            let lhs = e(p.x, t, (et - p.x).ln())?;
            Ok((lhs, 1.0 / (2.0 * et.sqrt() * (et - p.x).sqrt())))
        }
        IdentityId::E3a => {
            let g = |b: f64| Ok(b.exp() * e(b.exp() - et, t, b)?);
            let lhs = central(g, p.b, step(p.b))?;
            Ok((lhs, 0.25 * (-0.5 * t).exp() * (0.5 * p.b).exp()))
        }
        IdentityId::E4 => {
            let g = |b: f64| Ok(b * b.exp() * e(et - b.exp(), t, b)?);
            let lhs = central(g, p.b, step(p.b))?;
            Ok((lhs, 0.25 * (-0.5 * t).exp() * (0.5 * p.b).exp() * (2.0 + p.b)))
        }
        IdentityId::E5 | IdentityId::E6 => {
            let eb = p.b.exp();
            let reach = eb * (t - p.b).exp_m1();
            let (edge, h) = if id == IdentityId::E5 { (-reach, step(reach)) } else { (reach, -step(reach)) };
            let lhs = one_sided(|x| e(x, t, p.b), edge, h)?;
            let sign = if id == IdentityId::E5 { -1.0 } else { 1.0 };
            let rhs = (-2.0 * (p.b + t)).exp() * (0.5 * p.b).exp() * (0.5 * t).exp() * sign * reach / 16.0;
            Ok((lhs, rhs))
        }
        IdentityId::E7 => {
            let edge = (et - p.x).ln();
            let lhs = one_sided(|b| e(p.x, t, b), edge, -step(edge))?;
            let rhs = (-2.0 * t).exp() * et.sqrt() * (p.x - 4.0 * et) / (16.0 * (et - p.x).sqrt());
            Ok((lhs, rhs))
        }
        IdentityId::Bzt00 => {
            let z = p.x;
            let lhs = central(|b| e(z, t, b), 0.0, step(0.0))?;
            let reach = t.exp_m1();
            let big = (et + 1.0 - z) * (et + 1.0 + z);
            let w = (reach - z) * (reach + z);
            let (plus, minus) = hyp_pair(HyperArg::with_complement(w / big, 4.0 * et / big));
            let bracket = (1.0 - et * et + z * z) * minus + 2.0 * reach * plus;
            Ok((lhs, bracket / (2.0 * w * big.sqrt())))
        }
    }
}

fn sample(id: IdentityId, t: f64, rng: &mut ChaCha8Rng) -> LedgerPoint {
    let et = t.exp();
    let reach = t.exp_m1();
    let mut u = || rng.gen::<f64>();
    match id {
        IdentityId::E1 => {
            let b = 0.8 * t * u();
            let y = 2.0 * u() - 1.0;
            let x = y + 0.95 * (et - b.exp()) * (2.0 * u() - 1.0);
            LedgerPoint { t, x, b, y }
        }
        IdentityId::E2 => {
            let b = 0.8 * t * u();
            LedgerPoint { t, x: 0.95 * (et - b.exp()) * u(), b, y: 0.0 }
        }
        IdentityId::E2a | IdentityId::E7 => {
            let x = reach * (0.05 + 0.9 * u());
            LedgerPoint { t, x, b: (et - x).ln(), y: 0.0 }
        }
        IdentityId::E3a | IdentityId::E4 | IdentityId::E5 | IdentityId::E6 => {
            LedgerPoint { t, x: 0.0, b: 0.8 * t * u(), y: 0.0 }
        }
        IdentityId::Bzt00 => LedgerPoint { t, x: 0.9 * reach * u(), b: 0.0, y: 0.0 },
    }
}

/// Evaluate every identity at `per_t` random points for each `t`.
///
/// Rows are ordered by identity, then by `t`, then by sample index; the
/// sample stream is fixed by `seed`.
pub fn identity_ledger(t_samples: &[f64], per_t: usize, seed: u64) -> Result<LedgerReport> {
    for &t in t_samples {
        if !(t > 0.0 && t.is_finite()) {
            return Err(crate::Error::Domain { what: "time", value: t });
        }
    }
    let mut rows = Vec::with_capacity(IdentityId::ALL.len() * t_samples.len() * per_t);
    for (k, id) in IdentityId::ALL.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        for &t in t_samples {
            for _ in 0..per_t {
                let point = sample(*id, t, &mut rng);
                let (lhs, rhs) = evaluate_identity(*id, &point)?;
                rows.push(LedgerRow { id: *id, point, lhs, rhs, abs_err: (lhs - rhs).abs() });
            }
        }
    }
    Ok(LedgerReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_value_example() {
        let (lhs, rhs) = evaluate_identity(IdentityId::E2a, &LedgerPoint { t: 1.0, x: 1.0, b: 0.0, y: 0.0 }).unwrap();
        assert!((lhs - 0.231_353_228_688_235_6).abs() < 1e-14);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn ledger_shape_and_accuracy() {
        let r = identity_ledger(&[0.5, 1.0], 5, 7).unwrap();
        assert_eq!(r.rows.len(), 9 * 2 * 5);
        for id in IdentityId::ALL {
            assert!(r.max_abs_err(id) < 1e-6, "{} {}", id.label(), r.max_abs_err(id));
        }
        assert_eq!(r, identity_ledger(&[0.5, 1.0], 5, 7).unwrap());
    }
}
