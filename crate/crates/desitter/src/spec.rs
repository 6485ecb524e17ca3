//! Experiment specifications: the subcommand, its parameters as a key/value
//! map, and the output directory. Parameters come from command-line flags or
//! from one JSON document; either way they are checked against the
//! subcommand's key list before anything runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use desitter_core::data::{Bump, Gaussian, Plateau};
use desitter_core::field::Profile;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    EvalKernel,
    #[serde(rename = "solve-1d")]
    Solve1d,
    SolveNd,
    CompareFd,
    Identities,
    AuditDecay,
    AuditBounds,
    Huygens,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::EvalKernel,
        Subcommand::Solve1d,
        Subcommand::SolveNd,
        Subcommand::CompareFd,
        Subcommand::Identities,
        Subcommand::AuditDecay,
        Subcommand::AuditBounds,
        Subcommand::Huygens,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::EvalKernel => "eval-kernel",
            Subcommand::Solve1d => "solve-1d",
            Subcommand::SolveNd => "solve-nd",
            Subcommand::CompareFd => "compare-fd",
            Subcommand::Identities => "identities",
            Subcommand::AuditDecay => "audit-decay",
            Subcommand::AuditBounds => "audit-bounds",
            Subcommand::Huygens => "huygens",
        }
    }

    /// Accepted parameter keys.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            Subcommand::EvalKernel => &["kernel", "t", "z-grid", "b", "abs-tol", "rel-tol"],
            Subcommand::Solve1d => &["phi0", "phi1", "source", "t", "x-grid", "abs-tol", "rel-tol"],
            Subcommand::SolveNd => &["n", "phi0", "phi1", "source", "t", "r-grid", "abs-tol", "rel-tol"],
            Subcommand::CompareFd => &["case", "n", "k", "radius", "datum", "t", "nx", "abs-tol", "rel-tol"],
            Subcommand::Identities => &["t", "samples", "seed"],
            Subcommand::AuditDecay => &["estimate", "datum", "n", "p", "q", "s", "rho", "t", "k", "points-per-width", "max-points", "abs-tol", "rel-tol"],
            Subcommand::AuditBounds => &["bound", "param", "z-grid", "t", "samples", "seed", "abs-tol", "rel-tol"],
            Subcommand::Huygens => &["radius", "t", "abs-tol", "rel-tol"],
        }
    }
}

impl FromStr for Subcommand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::validation(format!("unknown subcommand {s:?}")))
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parameter value as written in a JSON document. Flags arrive as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
    List(Vec<f64>),
}

impl ParamValue {
    fn as_text(&self) -> String {
        match self {
            ParamValue::Number(v) if v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", *v as i64),
            ParamValue::Number(v) => format!("{v:?}"),
            ParamValue::Text(s) => s.clone(),
            ParamValue::List(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub subcommand: Subcommand,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))
    }

    /// Reject keys the subcommand does not know.
    pub fn check_keys(&self) -> Result<()> {
        let known: BTreeSet<&str> = self.subcommand.keys().iter().copied().collect();
        let unknown: Vec<&str> = self.params.keys().map(|k| k.as_str()).filter(|k| !known.contains(k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(format!("{} does not accept {}", self.subcommand, unknown.join(", "))))
        }
    }

    pub fn reader(&self) -> Result<Params> {
        self.check_keys()?;
        Ok(Params { values: self.params.iter().map(|(k, v)| (k.clone(), v.as_text())).collect(), resolved: BTreeMap::new() })
    }
}

/// Typed access to parameters with defaults; records the resolved values
/// for the manifest.
#[derive(Debug, Clone)]
pub struct Params {
    values: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Params {
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    fn raw(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        let v = match (self.values.get(key), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(Error::validation(format!("missing parameter {key}"))),
        };
        self.resolved.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn text(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        self.raw(key, default)
    }

    pub fn f64(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        let d = default.map(|v| format!("{v:?}"));
        let s = self.raw(key, d.as_deref())?;
        parse_f64(key, &s)
    }

    pub fn usize(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        let d = default.map(|v| v.to_string());
        let s = self.raw(key, d.as_deref())?;
        s.trim().parse().map_err(|_| Error::validation(format!("{key}: expected a non-negative integer, got {s:?}")))
    }

    pub fn list(&mut self, key: &str, default: Option<&str>) -> Result<Vec<f64>> {
        let s = self.raw(key, default)?;
        parse_list(key, &s)
    }

    pub fn grid(&mut self, key: &str, default: Option<&str>) -> Result<GridSpec> {
        let s = self.raw(key, default)?;
        s.parse().map_err(|e| prefixed(key, e))
    }

    pub fn data(&mut self, key: &str, default: Option<&str>) -> Result<DataSpec> {
        let s = self.raw(key, default)?;
        s.parse().map_err(|e| prefixed(key, e))
    }

    pub fn tolerances(&mut self, abs: f64, rel: f64) -> Result<(f64, f64)> {
        let a = self.f64("abs-tol", Some(abs))?;
        let r = self.f64("rel-tol", Some(rel))?;
        if !(a > 0.0 && r > 0.0) {
            return Err(Error::validation("tolerances must be positive"));
        }
        Ok((a, r))
    }
}

fn prefixed(key: &str, e: Error) -> Error {
    match e {
        Error::Validation(msg) => Error::Validation(format!("{key}: {msg}")),
        other => other,
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::validation(format!("{key}: expected a number, got {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::validation(format!("{key}: value must be finite")));
    }
    Ok(v)
}

pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(|p| parse_f64(key, p)).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::validation(format!("{key}: empty list")));
    }
    Ok(v)
}

/// `lo:hi:n`, `n` points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.hi } else { self.lo + h * i as f64 }).collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::validation(format!("expected lo:hi:n, got {s:?}")));
        }
        let lo = parse_f64("lo", parts[0])?;
        let hi = parse_f64("hi", parts[1])?;
        let n: usize = parts[2].trim().parse().map_err(|_| Error::validation(format!("bad point count {:?}", parts[2])))?;
        if n == 0 || (n > 1 && !(hi > lo)) {
            return Err(Error::validation(format!("need n >= 1 and lo < hi, got {s:?}")));
        }
        Ok(GridSpec { lo, hi, n })
    }
}

/// Named data families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSpec {
    /// `gaussian:k`: `exp(-k x²)`.
    Gaussian(f64),
    /// `bump[:R]`: `exp(1 - 1/(1 - (x/R)²))` on `|x| < R`, `R = 1` by default.
    Bump(f64),
    /// `constant-truncated[:R]`: one on `|x| <= R`, smoothly cut off over
    /// `[R, R + 1]`; `R = 10` by default.
    ConstantTruncated(f64),
    Zero,
}

impl FromStr for DataSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let positive = |a: Option<&str>, default: Option<f64>| -> Result<f64> {
            let v = match (a, default) {
                (Some(a), _) => parse_f64(name, a)?,
                (None, Some(d)) => d,
                (None, None) => return Err(Error::validation(format!("{name} needs a parameter, as in {name}:4"))),
            };
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::validation(format!("{name}: parameter must be positive")))
            }
        };
        match name {
            "gaussian" => Ok(DataSpec::Gaussian(positive(arg, None)?)),
            "bump" => Ok(DataSpec::Bump(positive(arg, Some(1.0))?)),
            "constant-truncated" => Ok(DataSpec::ConstantTruncated(positive(arg, Some(10.0))?)),
            "zero" if arg.is_none() => Ok(DataSpec::Zero),
            _ => Err(Error::validation(format!("unknown data family {s:?}; use gaussian:k, bump[:R], constant-truncated[:R] or zero"))),
        }
    }
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSpec::Gaussian(k) => write!(f, "gaussian:{k}"),
            DataSpec::Bump(r) => write!(f, "bump:{r}"),
            DataSpec::ConstantTruncated(r) => write!(f, "constant-truncated:{r}"),
            DataSpec::Zero => f.write_str("zero"),
        }
    }
}

impl DataSpec {
    pub fn profile(&self) -> DataProfile {
        match *self {
            DataSpec::Gaussian(k) => DataProfile::Gaussian(Gaussian::new(k)),
            DataSpec::Bump(r) => DataProfile::Bump(Bump::new(r)),
            DataSpec::ConstantTruncated(r) => DataProfile::Plateau(Plateau { level: 1.0, radius: r, width: 1.0 }),
            DataSpec::Zero => DataProfile::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataProfile {
    Gaussian(Gaussian),
    Bump(Bump),
    Plateau(Plateau),
    Zero,
}

impl Profile for DataProfile {
    fn value(&self, x: f64) -> f64 {
        match self {
            DataProfile::Gaussian(p) => p.value(x),
            DataProfile::Bump(p) => p.value(x),
            DataProfile::Plateau(p) => p.value(x),
            DataProfile::Zero => 0.0,
        }
    }
    fn derivative(&self, x: f64) -> f64 {
        match self {
            DataProfile::Gaussian(p) => p.derivative(x),
            DataProfile::Bump(p) => p.derivative(x),
            DataProfile::Plateau(p) => p.derivative(x),
            DataProfile::Zero => 0.0,
        }
    }
    fn support_radius(&self) -> Option<f64> {
        match self {
            DataProfile::Gaussian(p) => p.support_radius(),
            DataProfile::Bump(p) => p.support_radius(),
            DataProfile::Plateau(p) => p.support_radius(),
            DataProfile::Zero => Some(0.0),
        }
    }
}
