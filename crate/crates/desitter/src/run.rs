//! Execution of an [`ExperimentSpec`]: validate every parameter, compute,
//! write the tables and summaries, then the manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use desitter_core::data::{Bump, Radial, Steady};
use desitter_core::identities::identity_ledger;
use desitter_core::kernels::{kernel_k0, kernel_k1, propagator_e, ConeQuery};
use desitter_core::quad::QuadratureConfig;
use desitter_core::solver_1d::{solve_1d, CauchyData};
use desitter_core::solver_nd::{huygens_tail_probe, solve_cauchy_nd, solve_source_nd, SphericalMeanCfg};
use desitter_core::Error as CoreError;
use serde::Serialize;

use crate::bounds::{audit_bound, audit_k0_mass, log_grid, recheck, KernelBound};
use crate::compare::compare_fd;
use crate::decay::{audit_cauchy_decay, default_t_grid, AuditSettings, Datum, DecayConfig, DecayEstimate};
use crate::io::{Cell, OutputSet, Table};
use crate::spec::{DataProfile, DataSpec, ExperimentSpec, Params, Subcommand};
use crate::{Error, Result};

/// Suprema are compared between `t <= DRIFT_SPLIT` and the full grid.
pub const DRIFT_SPLIT: f64 = 5.0;
/// Largest accepted relative drift of a decay supremum.
pub const DRIFT_TOL: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestHeader<'a> {
    version: &'static str,
    spec: &'a ExperimentSpec,
    resolved_params: &'a BTreeMap<String, String>,
    tolerances: Option<Tolerances>,
    wall_time_s: f64,
}

/// Paths written by a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let start = Instant::now();
    let mut params = spec.reader()?;
    let job = Job::parse(spec.subcommand, &mut params)?;
    let mut out = OutputSet::create(&spec.out_dir)?;
    let tolerances = job.execute(&mut out)?;
    let files = out.files().iter().map(|f| out.dir().join(&f.name)).collect();
    let header = ManifestHeader {
        version: env!("CARGO_PKG_VERSION"),
        spec,
        resolved_params: params.resolved(),
        tolerances,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let manifest = out.finish(&header)?;
    Ok(RunOutput { manifest, files })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelName {
    K0,
    K1,
    E,
}

enum Job {
    EvalKernel { kernel: KernelName, t: Vec<f64>, z: Vec<f64>, b: f64 },
    Solve1d { phi0: DataSpec, phi1: DataSpec, source: DataSpec, t: Vec<f64>, x: Vec<f64>, tol: Tolerances },
    SolveNd { n: usize, phi0: DataSpec, phi1: DataSpec, source: DataSpec, t: Vec<f64>, r: Vec<f64>, tol: Tolerances },
    CompareFd { n: usize, data: DataSpec, velocity: bool, t: f64, nx: usize, tol: Tolerances },
    Identities { t: Vec<f64>, samples: usize, seed: u64 },
    AuditDecay { estimate: DecayEstimate, datum: Datum, cfg: DecayConfig, k: f64, settings: AuditSettings },
    AuditBounds { bound: Option<KernelBound>, param: f64, z: Vec<f64>, t: Vec<f64>, samples: usize, seed: u64, tol: Tolerances },
    Huygens { radius: f64, t: Vec<f64>, tol: Tolerances },
}

fn tol(params: &mut Params, abs: f64, rel: f64) -> Result<Tolerances> {
    let (abs_tol, rel_tol) = params.tolerances(abs, rel)?;
    Ok(Tolerances { abs_tol, rel_tol })
}

fn composite(t: &Tolerances) -> QuadratureConfig {
    QuadratureConfig::composite(t.abs_tol, t.rel_tol)
}

fn positive_times(t: &[f64]) -> Result<()> {
    if t.iter().all(|t| *t > 0.0) {
        Ok(())
    } else {
        Err(Error::validation("times must be positive"))
    }
}

impl Job {
    fn parse(cmd: Subcommand, p: &mut Params) -> Result<Job> {
        let job = match cmd {
            Subcommand::EvalKernel => {
                let kernel = match p.text("kernel", Some("k1"))?.as_str() {
                    "k0" => KernelName::K0,
                    "k1" => KernelName::K1,
                    "e" => KernelName::E,
                    other => return Err(Error::validation(format!("kernel must be k0, k1 or e, got {other:?}"))),
                };
                let t = p.list("t", Some("1"))?;
                positive_times(&t)?;
                let z = p.grid("z-grid", Some("0:1.7:18"))?.points();
                let b = p.f64("b", Some(0.0))?;
                Job::EvalKernel { kernel, t, z, b }
            }
            Subcommand::Solve1d => {
                let phi0 = p.data("phi0", Some("zero"))?;
                let phi1 = p.data("phi1", Some("zero"))?;
                let source = p.data("source", Some("zero"))?;
                let t = p.list("t", Some("1"))?;
                positive_times(&t)?;
                let x = p.grid("x-grid", Some("-3:3:61"))?.points();
                Job::Solve1d { phi0, phi1, source, t, x, tol: tol(p, 1e-10, 1e-8)? }
            }
            Subcommand::SolveNd => {
                let n = p.usize("n", Some(3))?;
                if !(n == 2 || n == 3) {
                    return Err(Error::validation(format!("n must be 2 or 3, got {n}")));
                }
                let phi0 = p.data("phi0", Some("zero"))?;
                let phi1 = p.data("phi1", Some("zero"))?;
                let source = p.data("source", Some("zero"))?;
                let t = p.list("t", Some("1"))?;
                positive_times(&t)?;
                let r = p.grid("r-grid", Some("0:2:11"))?.points();
                Job::SolveNd { n, phi0, phi1, source, t, r, tol: tol(p, 1e-10, 1e-8)? }
            }
            Subcommand::CompareFd => {
                let data = match p.text("case", Some("gaussian"))?.as_str() {
                    "gaussian" => DataSpec::Gaussian(p.f64("k", Some(4.0))?),
                    "bump" => DataSpec::Bump(p.f64("radius", Some(1.0))?),
                    other => return Err(Error::validation(format!("case must be gaussian or bump, got {other:?}"))),
                };
                if let DataSpec::Gaussian(k) | DataSpec::Bump(k) = data {
                    if !(k > 0.0) {
                        return Err(Error::validation("the case parameter must be positive"));
                    }
                }
                let velocity = match p.text("datum", Some("phi0"))?.as_str() {
                    "phi0" => false,
                    "phi1" => true,
                    other => return Err(Error::validation(format!("datum must be phi0 or phi1, got {other:?}"))),
                };
                let n = p.usize("n", Some(1))?;
                if !(n == 1 || n == 3) {
                    return Err(Error::validation(format!("n must be 1 or 3, got {n}")));
                }
                let t = p.f64("t", Some(1.0))?;
                positive_times(&[t])?;
                let nx = p.usize("nx", Some(4001))?;
                if nx < 16 {
                    return Err(Error::validation("nx must be at least 16"));
                }
                Job::CompareFd { n, data, velocity, t, nx, tol: tol(p, 1e-10, 1e-8)? }
            }
            Subcommand::Identities => {
                let t = p.list("t", Some("0.5,1,2"))?;
                positive_times(&t)?;
                let samples = p.usize("samples", Some(50))?;
                let seed = p.usize("seed", Some(7))? as u64;
                Job::Identities { t, samples, seed }
            }
            Subcommand::AuditDecay => {
                let name = p.text("estimate", Some("cauchy"))?;
                let estimate = DecayEstimate::ALL
                    .into_iter()
                    .find(|e| e.name() == name)
                    .ok_or_else(|| Error::validation(format!("unknown estimate {name:?}")))?;
                let datum = match p.text("datum", Some(if estimate.is_source() { "source" } else { "velocity" }))?.as_str() {
                    "position" => Datum::Position,
                    "velocity" => Datum::Velocity,
                    "source" => Datum::Source,
                    other => return Err(Error::validation(format!("datum must be position, velocity or source, got {other:?}"))),
                };
                let line = matches!(estimate, DecayEstimate::LineSource | DecayEstimate::LineLqLq | DecayEstimate::LineLpLq);
                let n = p.usize("n", Some(if line { 1 } else { 3 }))?;
                let rho = p.f64("rho", Some(1.0))?;
                let pp = p.f64("p", Some(if line { 2.0 } else { 4.0 / 3.0 }))?;
                let q_default = if estimate == DecayEstimate::LineLqLq {
                    pp
                } else if line {
                    1.0 / (1.0 / pp - 1.0 + 1.0 / rho)
                } else {
                    pp / (pp - 1.0)
                };
                let q = p.f64("q", Some(q_default))?;
                let s = p.f64("s", Some(0.0))?;
                let t_default: Vec<String> = default_t_grid().iter().map(|t| format!("{t:?}")).collect();
                let t_grid = p.list("t", Some(&t_default.join(",")))?;
                positive_times(&t_grid)?;
                let k = p.f64("k", Some(if n == 2 { 0.05 } else { 0.25 }))?;
                if !(k > 0.0) {
                    return Err(Error::validation("k must be positive"));
                }
                let points_per_width = p.f64("points-per-width", Some(10.0))?;
                let max_points = p.usize("max-points", Some(4096))?;
                if !(points_per_width >= 2.0) || max_points < 16 {
                    return Err(Error::validation("need points-per-width >= 2 and max-points >= 16"));
                }
                let t = tol(p, 1e-10, 1e-8)?;
                let settings = AuditSettings { quad: composite(&t), points_per_width, max_points };
                if estimate.is_source() != (datum == Datum::Source) {
                    return Err(Error::validation(format!("datum {datum:?} does not fit the {name} estimate")));
                }
                Job::AuditDecay { estimate, datum, cfg: DecayConfig { n, p: pp, q, s, rho, t_grid }, k, settings }
            }
            Subcommand::AuditBounds => {
                let name = p.text("bound", Some("k1-power"))?;
                let bound = if name == "k0-mass" {
                    None
                } else {
                    Some(
                        KernelBound::ALL
                            .into_iter()
                            .find(|b| b.name() == name)
                            .ok_or_else(|| Error::validation(format!("unknown bound {name:?}")))?,
                    )
                };
                let param = match bound {
                    Some(b) => {
                        let v = p.f64("param", Some(b.default_params()[0]))?;
                        b.validate(v)?;
                        v
                    }
                    None => 0.0,
                };
                let zg = p.grid("z-grid", Some(&format!("1.01:{}:40", 8f64.exp())))?;
                if !(zg.lo > 1.0) {
                    return Err(Error::validation("z-grid must start above 1"));
                }
                let z = log_grid(zg.lo, zg.hi, zg.n);
                let t = if bound.is_none() {
                    let tg = p.grid("t", Some("0.1:5:40"))?;
                    positive_times(&[tg.lo])?;
                    tg.points()
                } else {
                    Vec::new()
                };
                let samples = p.usize("samples", Some(10))?;
                let seed = p.usize("seed", Some(7))? as u64;
                Job::AuditBounds { bound, param, z, t, samples, seed, tol: tol(p, 1e-13, 1e-9)? }
            }
            Subcommand::Huygens => {
                let radius = p.f64("radius", Some(0.5))?;
                if !(radius > 0.0) {
                    return Err(Error::validation("radius must be positive"));
                }
                let default: Vec<String> = [2.2, 3.0, 4.0, 6.0, 10.0].iter().map(|c| format!("{:?}", (1.0 + c * radius).ln())).collect();
                let t = p.list("t", Some(&default.join(",")))?;
                positive_times(&t)?;
                Job::Huygens { radius, t, tol: tol(p, 1e-10, 1e-8)? }
            }
        };
        Ok(job)
    }

    fn execute(self, out: &mut OutputSet) -> Result<Option<Tolerances>> {
        match self {
            Job::EvalKernel { kernel, t, z, b } => {
                let mut table = Table::new(&["t", "z", "value", "est_err"]);
                for &t in &t {
                    for &z in &z {
                        let v = match kernel {
                            KernelName::K0 if z > t.exp_m1() => Err(CoreError::Support),
                            KernelName::K0 => kernel_k0(z, t),
                            KernelName::K1 => kernel_k1(z, t),
                            KernelName::E => propagator_e(&ConeQuery::new(z, t, 0.0, b)),
                        };
                        // Outside the cone the kernels vanish.
                        let (value, err) = match v {
                            Ok(k) => (k.value, k.est_err),
                            Err(CoreError::Support) => (0.0, 0.0),
                            Err(e) => return Err(e.into()),
                        };
                        table.push(vec![t.into(), z.into(), value.into(), err.into()]);
                    }
                }
                out.write_table("kernel", &table)?;
                Ok(None)
            }
            Job::Solve1d { phi0, phi1, source, t, x, tol } => {
                let (p0, p1, f) = (phi0.profile(), phi1.profile(), Steady(source.profile()));
                let data = CauchyData::new(&p0, &p1, &f);
                let cfg = composite(&tol);
                let mut table = Table::new(&["x", "t", "u", "est_err"]);
                for &t in &t {
                    for &x in &x {
                        let s = solve_1d(&data, x, t, &cfg)?;
                        table.push(vec![x.into(), t.into(), s.u.into(), s.est_err.into()]);
                    }
                }
                out.write_table("solution", &table)?;
                Ok(Some(tol))
            }
            Job::SolveNd { n, phi0, phi1, source, t, r, tol } => {
                let cfg = SphericalMeanCfg::new(composite(&tol));
                let (p0, p1) = (Radial(phi0.profile()), Radial(phi1.profile()));
                let f = Steady(Radial(source.profile()));
                let has_source = source != DataSpec::Zero;
                let mut table = Table::new(&["r", "t", "u", "est_err"]);
                for &t in &t {
                    for &r in &r {
                        let (u, err) = match n {
                            2 => {
                                let c = solve_cauchy_nd::<2>(&p0, &p1, [r, 0.0], t, &cfg)?;
                                let s = if has_source { Some(solve_source_nd::<2>(&f, [r, 0.0], t, &cfg)?) } else { None };
                                (c.u + s.map_or(0.0, |s| s.u), c.est_err + s.map_or(0.0, |s| s.est_err))
                            }
                            _ => {
                                let c = solve_cauchy_nd::<3>(&p0, &p1, [r, 0.0, 0.0], t, &cfg)?;
                                let s = if has_source { Some(solve_source_nd::<3>(&f, [r, 0.0, 0.0], t, &cfg)?) } else { None };
                                (c.u + s.map_or(0.0, |s| s.u), c.est_err + s.map_or(0.0, |s| s.est_err))
                            }
                        };
                        table.push(vec![r.into(), t.into(), u.into(), err.into()]);
                    }
                }
                out.write_table("solution", &table)?;
                Ok(Some(tol))
            }
            Job::CompareFd { n, data, velocity, t, nx, tol } => {
                let profile = data.profile();
                let zero = DataProfile::Zero;
                let (p0, p1): (&DataProfile, &DataProfile) = if velocity { (&zero, &profile) } else { (&profile, &zero) };
                let c = compare_fd(n, p0, p1, t, nx, &composite(&tol))?;
                #[derive(Serialize)]
                struct Doc {
                    case: String,
                    datum: &'static str,
                    #[serde(flatten)]
                    comparison: crate::compare::FdComparison,
                }
                out.write_json(
                    "compare.json",
                    &Doc { case: data.to_string(), datum: if velocity { "phi1" } else { "phi0" }, comparison: c },
                )?;
                Ok(Some(tol))
            }
            Job::Identities { t, samples, seed } => {
                let report = identity_ledger(&t, samples, seed)?;
                let mut table = Table::new(&["identity_id", "point", "lhs", "rhs", "abs_err"]);
                for row in &report.rows {
                    let p = row.point;
                    let point = format!("t={:?};x={:?};b={:?};y={:?}", p.t, p.x, p.b, p.y);
                    table.push(vec![row.id.label().into(), point.into(), row.lhs.into(), row.rhs.into(), row.abs_err.into()]);
                }
                out.write_table("ledger", &table)?;
                let summary: BTreeMap<&str, f64> =
                    desitter_core::identities::IdentityId::ALL.iter().map(|id| (id.label(), report.max_abs_err(*id))).collect();
                out.write_json("ledger_summary.json", &serde_json::json!({ "seed": seed, "max_abs_err": summary }))?;
                Ok(None)
            }
            Job::AuditDecay { estimate, datum, cfg, k, settings } => {
                let g = desitter_core::data::Gaussian::new(k);
                let report = audit_cauchy_decay(estimate, datum, &cfg, &g, &settings)?;
                let mut table = Table::new(&["t", "lhs", "rhs_shape", "ratio"]);
                for r in &report.rows {
                    table.push(vec![r.t.into(), r.lhs.into(), r.rhs_shape.into(), r.ratio.into()]);
                }
                out.write_table("decay", &table)?;
                let drift = report.drift(DRIFT_SPLIT);
                let stable = report.admissible && report.sup_ratio.is_finite() && drift < DRIFT_TOL;
                out.write_json(
                    "decay.json",
                    &serde_json::json!({
                        "config": report.config,
                        "estimate": estimate.name(),
                        "datum": datum,
                        "k": k,
                        "sup_ratio": report.sup_ratio,
                        "admissible": report.admissible,
                        "stable": stable,
                        "drift": drift,
                        "note": report.note,
                    }),
                )?;
                Ok(Some(Tolerances { abs_tol: settings.quad.abs_tol, rel_tol: settings.quad.rel_tol }))
            }
            Job::AuditBounds { bound, param, z, t, samples, seed, tol } => {
                let cfg = QuadratureConfig::double_exponential(tol.abs_tol, tol.rel_tol);
                match bound {
                    Some(b) => {
                        let report = audit_bound(b, param, &z, &cfg)?;
                        let worst = if samples > 0 { recheck(&report, samples, seed, &cfg)? } else { 0.0 };
                        let mut table = Table::new(&["z", "lhs", "lhs_err", "rhs", "ratio"]);
                        for r in &report.rows {
                            table.push(vec![r.z.into(), r.lhs.into(), r.lhs_err.into(), r.rhs.into(), r.ratio.into()]);
                        }
                        out.write_table("bounds", &table)?;
                        out.write_json(
                            "bounds.json",
                            &serde_json::json!({
                                "bound": b.name(),
                                "param": param,
                                "sup_ratio": report.sup_ratio,
                                "refined_sup_ratio": report.refined_sup_ratio,
                                "stable": report.stable,
                                "failed": report.failed,
                                "recheck_samples": samples,
                                "recheck_worst": worst,
                            }),
                        )?;
                    }
                    None => {
                        let report = audit_k0_mass(&t, &cfg)?;
                        let mut table = Table::new(&["t", "k0_abs_mass"]);
                        for (t, v) in &report.rows {
                            table.push(vec![Cell::from(*t), Cell::from(*v)]);
                        }
                        out.write_table("bounds", &table)?;
                        out.write_json(
                            "bounds.json",
                            &serde_json::json!({
                                "bound": "k0-mass",
                                "sup": report.sup,
                                "refined_sup": report.refined_sup,
                                "stable": report.stable,
                            }),
                        )?;
                    }
                }
                Ok(Some(tol))
            }
            Job::Huygens { radius, t, tol } => {
                let rows = huygens_tail_probe(&Radial(Bump::new(radius)), &t, &SphericalMeanCfg::new(composite(&tol)))?;
                let mut table = Table::new(&["t", "u_desitter", "u_flat", "est_err"]);
                for r in &rows {
                    table.push(vec![r.t.into(), r.u_desitter.into(), r.u_flat.into(), r.est_err.into()]);
                }
                out.write_table("huygens", &table)?;
                let past: Vec<_> = rows.iter().filter(|r| r.t.exp_m1() > 2.0 * radius).collect();
                let tail = !past.is_empty() && past.iter().all(|r| r.u_desitter.abs() > 10.0 * r.est_err && r.u_flat.abs() <= r.est_err);
                out.write_json("huygens.json", &serde_json::json!({ "radius": radius, "tail_detected": tail }))?;
                Ok(Some(tol))
            }
        }
    }
}
