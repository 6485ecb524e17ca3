//! One dimensional quadrature.
//!
//! Two adaptive rules are provided: a composite Gauss-Legendre rule with
//! Kronrod error estimates (bisection of the worst panel), and the
//! double-exponential (tanh-sinh) rule for integrands with endpoint
//! singularities. Fixed Gauss-Legendre node sets are exposed for the angular
//! rules of the spherical means.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Adaptive composite Gauss-Legendre (7 points) with Kronrod (15 points) estimates.
    GaussLegendreComposite,
    /// Tanh-sinh rule; exponent-agnostic at the endpoints.
    DoubleExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel budget for the composite rule; level budget (capped at 12)
    /// for the double-exponential rule.
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rule: Rule::GaussLegendreComposite,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_refinements: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn composite(abs_tol: f64, rel_tol: f64) -> Self {
        Self { rule: Rule::GaussLegendreComposite, abs_tol, rel_tol, ..Self::default() }
    }

    pub fn double_exponential(abs_tol: f64, rel_tol: f64) -> Self {
        Self { rule: Rule::DoubleExponential, abs_tol, rel_tol, max_refinements: 12 }
    }

    pub fn with_rule(self, rule: Rule) -> Self {
        let max_refinements = match rule {
            Rule::DoubleExponential => self.max_refinements.min(12),
            Rule::GaussLegendreComposite => self.max_refinements,
        };
        Self { rule, max_refinements, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::Setup("quadrature tolerances must be positive"));
        }
        if self.max_refinements == 0 {
            return Err(Error::Setup("quadrature needs at least one refinement"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value of an integral with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
    pub evals: usize,
}

impl core::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, err: self.err + o.err, evals: self.evals + o.evals }
    }
}

/// Integrate `f` over `[a, b]` with the rule selected in `cfg`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    match cfg.rule {
        Rule::GaussLegendreComposite => gauss_kronrod(f, a, b, cfg),
        Rule::DoubleExponential => tanh_sinh(f, a, b, cfg),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hl = hl.abs();
    let value = resk * hl;
    resasc *= hl;
    resabs *= hl;
    let mut err = ((resk - resg) * hl).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, err }
}

/// Adaptive composite Gauss-Kronrod rule; bisects the worst panel until the
/// summed error estimate meets the tolerance.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain { what: "integration limit", value: if a.is_finite() { b } else { a } });
    }
    if a == b {
        return Ok(Estimate::default());
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(16);
    panels.push(kronrod_panel(&mut f, a, b));
    let mut evals = 15;
    loop {
        let (value, err) = panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::Accuracy { estimate: value, est_err: f64::INFINITY });
        }
        if err <= cfg.target(value) {
            return Ok(Estimate { value, err, evals });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= cfg.max_refinements || mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            return Err(Error::Accuracy { estimate: value, est_err: err });
        }
        panels[worst] = kronrod_panel(&mut f, p.a, mid);
        panels.push(kronrod_panel(&mut f, mid, p.b));
        evals += 30;
    }
}

/// A tanh-sinh node: the abscissa and its distances to both limits, the
/// latter computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeNode {
    pub x: f64,
    pub from_a: f64,
    pub from_b: f64,
}

/// Tanh-sinh rule for a plain integrand.
///
/// Nodes whose abscissa rounds onto an endpoint are skipped.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let (lo, hi) = (a.min(b), a.max(b));
    tanh_sinh_nodes(|n| if n.x > lo && n.x < hi { f(n.x) } else { 0.0 }, a, b, cfg)
}

/// Tanh-sinh rule whose integrand sees the distance to each endpoint, so it
/// can resolve singular factors like `(b - x)^{-β}` accurately. Nodes are
/// used until their distance to the endpoint underflows, even where the
/// abscissa itself rounds onto the endpoint.
pub fn tanh_sinh_nodes<F: FnMut(DeNode) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain { what: "integration limit", value: if a.is_finite() { b } else { a } });
    }
    if a == b {
        return Ok(Estimate::default());
    }
    if b < a {
        let e = tanh_sinh_forward(|n| f(DeNode { x: n.x, from_a: n.from_b, from_b: n.from_a }), b, a, cfg)?;
        return Ok(Estimate { value: -e.value, ..e });
    }
    tanh_sinh_forward(f, a, b, cfg)
}

fn tanh_sinh_forward<F: FnMut(DeNode) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let half = 0.5 * (b - a);
    let mut evals = 0usize;
    let node_sum = |f: &mut F, t: f64, evals: &mut usize| -> Option<f64> {
        // Returns None once the nodes run into the endpoints.
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let comp = (-u).exp() / cu; // 1 - tanh(u)
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if comp == 0.0 || !w.is_finite() || w == 0.0 {
            return None;
        }
        let d = half * comp;
        let right = DeNode { x: b - d, from_a: 2.0 * half - d, from_b: d };
        let left = DeNode { x: a + d, from_a: d, from_b: 2.0 * half - d };
        *evals += 2;
        Some(w * (f(right) + f(left)))
    };

    let mut sum = FRAC_PI_2 * f(DeNode { x: a + half, from_a: half, from_b: half });
    evals += 1;
    let scan = |f: &mut F, start: f64, step: f64, sum_hint: f64, evals: &mut usize| -> f64 {
        let mut s = 0.0;
        let mut k = 0usize;
        loop {
            let t = start + step * k as f64;
            match node_sum(f, t, evals) {
                None => break,
                Some(v) => {
                    s += v;
                    if t > 1.0 && v.abs() <= 1e-18 * (sum_hint.abs() + s.abs()) {
                        break;
                    }
                }
            }
            k += 1;
            if t > 8.0 {
                break;
            }
        }
        s
    };
    sum += scan(&mut f, 1.0, 1.0, sum, &mut evals);
    let mut h = 1.0;
    let mut prev = half * h * sum;
    let levels = cfg.max_refinements.min(12);
    let mut last_diff = f64::INFINITY;
    for level in 1..=levels {
        h *= 0.5;
        let add = scan(&mut f, h, 2.0 * h, sum, &mut evals);
        sum += add;
        let current = half * h * sum;
        if !current.is_finite() {
            return Err(Error::Accuracy { estimate: current, est_err: f64::INFINITY });
        }
        let diff = (current - prev).abs();
        prev = current;
        if level >= 3 && diff <= cfg.target(current) {
            return Ok(Estimate { value: current, err: diff, evals });
        }
        last_diff = diff;
    }
    Err(Error::Accuracy { estimate: prev, est_err: last_diff })
}

/// Fixed Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
