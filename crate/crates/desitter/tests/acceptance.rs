//! End-to-end acceptance checks. Runs without the libtest harness so each
//! check prints one PASS/FAIL line whether or not it succeeds.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use desitter::bounds::{audit_bound, audit_k0_mass, default_quadrature, default_z_grid, recheck, KernelBound, STABILITY_TOL};
use desitter::compare::compare_fd;
use desitter::decay::{admissible_exponents, audit_cauchy_decay, AuditSettings, Datum, DecayConfig, DecayEstimate, default_t_grid};
use desitter::run::{DRIFT_SPLIT, DRIFT_TOL};
use desitter_core::data::{Bump, Constant, FnSource, Gaussian, Radial, Steady, Zero};
use desitter_core::identities::{identity_ledger, IdentityId};
use desitter_core::kernels::{propagator_e, riemann_r, CharCoords, ConeQuery, TimeSlice};
use desitter_core::quad::{tanh_sinh, QuadratureConfig};
use desitter_core::solver_1d::{solve_cauchy_1d, solve_source_1d, solve_source_duhamel, CauchyData};
use desitter_core::solver_nd::{huygens_tail_probe, solve_cauchy_nd, solve_source_nd, SphericalMeanCfg};
use desitter_core::special::{gauss_series, hyp_half, hyp_log_expansion, hyp_minus_half, hyp_pair, hyp_pair_log, HyperArg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn kernel_masses() -> Outcome {
    let start = Instant::now();
    let cfg = QuadratureConfig::double_exponential(1e-15, 1e-12);
    let mut worst = 0.0f64;
    for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let ts = TimeSlice::new(t).unwrap();
        let m1 = tanh_sinh(|z| ts.k1(z), 0.0, ts.reach, &cfg).unwrap().value;
        let m0 = tanh_sinh(|z| ts.k0(z), 0.0, ts.reach, &cfg).unwrap().value;
        let e1 = (m1 - 0.5 * t).abs() / (0.5 * t);
        let expect0 = -0.5 * (-0.5 * t).exp_m1();
        let e0 = (m0 - expect0).abs() / expect0;
        worst = worst.max(e1).max(e0);
    }
    let el = start.elapsed();
    outcome(worst <= 1e-6 && within(el, 10.0), format!("max rel err {worst:.2e}, {:.2} s", el.as_secs_f64()))
}

fn identity_ledger_check() -> Outcome {
    let start = Instant::now();
    let report = identity_ledger(&[0.25, 0.5, 1.0, 2.0, 4.0], 10, 2024).unwrap();
    let el = start.elapsed();
    let mut worst = 0.0f64;
    let mut counts_ok = true;
    let mut parts = Vec::new();
    for id in IdentityId::ALL.into_iter().filter(|id| *id != IdentityId::E1) {
        let n = report.rows.iter().filter(|r| r.id == id).count();
        counts_ok &= n == 50;
        let e = report.max_abs_err(id);
        worst = worst.max(e);
        parts.push(format!("{} {e:.1e}", id.label()));
    }
    outcome(
        counts_ok && worst <= 1e-6 && within(el, 5.0),
        format!("max abs err {worst:.2e} over 8 identities x 50 points, {:.2} s [{}]", el.as_secs_f64(), parts.join(", ")),
    )
}

fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

fn riemann_conditions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-3;
    let (mut e1, mut e2, mut e3) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let x0 = rng.gen_range(-1.0..1.0);
        let t0: f64 = rng.gen_range(-0.5..0.5);
        let (a, b) = (x0 + t0.exp(), x0 - t0.exp());
        let r = |l: f64, m: f64| riemann_r(&CharCoords::new(l, m, a, b)).unwrap();
        // (i) along m = b
        let l = b + (a - b) * rng.gen_range(0.2..3.0);
        let rl = d1(|l| r(l, b), l, h);
        e1 = e1.max((rl - r(l, b) / (2.0 * (l - b))).abs());
        // (ii) along l = a
        let m = a - (a - b) * rng.gen_range(0.2..3.0);
        let rm = d1(|m| r(a, m), m, h);
        e2 = e2.max((rm + r(a, m) / (2.0 * (a - m))).abs());
        // (iii)
        e3 = e3.max((r(a, b) - 1.0).abs());
    }
    outcome(e1 <= 1e-7 && e2 <= 1e-7 && e3 <= 1e-12, format!("(i) {e1:.1e}, (ii) {e2:.1e}, (iii) {e3:.1e} at 50 points"))
}

fn interior_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let hs = [1e-2, 5e-3, 2.5e-3];
    let mut min_order = f64::INFINITY;
    let mut max_res = 0.0f64;
    for _ in 0..20 {
        let b: f64 = rng.gen_range(0.0..0.5);
        let t: f64 = b + rng.gen_range(0.5..1.5);
        let x = rng.gen_range(-0.6..0.6) * (t.exp() - b.exp());
        let e = |x: f64, t: f64| propagator_e(&ConeQuery::new(x, t, 0.0, b)).unwrap().value;
        let res: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let tt = (e(x, t + h) - 2.0 * e(x, t) + e(x, t - h)) / (h * h);
                let xx = (e(x + h, t) - 2.0 * e(x, t) + e(x - h, t)) / (h * h);
                (tt - (2.0 * t).exp() * xx).abs()
            })
            .collect();
        // Least-squares slope of ln|res| against ln h.
        let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = res.iter().map(|r| r.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / 3.0, ly.iter().sum::<f64>() / 3.0);
        let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        min_order = min_order.min(slope);
        max_res = max_res.max(res[2]);
    }
    outcome(min_order >= 1.8, format!("min fitted order {min_order:.3} at 20 points, max residual at h = 2.5e-3: {max_res:.1e}"))
}

fn fd_agreement(n: usize) -> Outcome {
    let start = Instant::now();
    let c = compare_fd(n, &Gaussian::new(4.0), &Zero, 1.0, 4001, &QuadratureConfig::composite(1e-10, 1e-8)).unwrap();
    let el = start.elapsed();
    outcome(
        c.rel_l2_error <= 1e-3 && c.reduction >= 3.5 && within(el, 60.0),
        format!(
            "rel L2 {:.2e} at nx = {}, {:.2e} at nx = {}, reduction {:.3}, {:.2} s",
            c.rel_l2_error,
            c.nx,
            c.refined_rel_l2_error,
            c.refined_nx,
            c.reduction,
            el.as_secs_f64()
        ),
    )
}

fn special_solutions() -> Outcome {
    let cfg = QuadratureConfig::composite(1e-12, 1e-11);
    let sm = SphericalMeanCfg::new(cfg);
    let one = Constant(1.0);
    let rone = Radial(one);
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let expect = [0.5 * t * t, t, 1.0];
        for x in [0.0, 0.7] {
            let got1 = [
                solve_source_1d(&Steady(one), x, t, &cfg).unwrap().u,
                solve_cauchy_1d(&CauchyData::initial(&Zero, &one), x, t, &cfg).unwrap().u,
                solve_cauchy_1d(&CauchyData::initial(&one, &Zero), x, t, &cfg).unwrap().u,
            ];
            let got2 = [
                solve_source_nd::<2>(&Steady(rone), [x, 0.2], t, &sm).unwrap().u,
                solve_cauchy_nd::<2>(&Zero, &rone, [x, 0.2], t, &sm).unwrap().u,
                solve_cauchy_nd::<2>(&rone, &Zero, [x, 0.2], t, &sm).unwrap().u,
            ];
            let got3 = [
                solve_source_nd::<3>(&Steady(rone), [x, 0.2, -0.1], t, &sm).unwrap().u,
                solve_cauchy_nd::<3>(&Zero, &rone, [x, 0.2, -0.1], t, &sm).unwrap().u,
                solve_cauchy_nd::<3>(&rone, &Zero, [x, 0.2, -0.1], t, &sm).unwrap().u,
            ];
            for got in [got1, got2, got3] {
                for (g, e) in got.iter().zip(expect) {
                    worst = worst.max((g - e).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-6, format!("max abs err {worst:.2e} over f = 1, phi1 = 1, phi0 = 1 in n = 1, 2, 3"))
}

fn source_routes() -> Outcome {
    let f = FnSource { f: |x: f64, t: f64| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.5 * t.sin()), support: Some(7.0) };
    let cfg = QuadratureConfig::composite(1e-13, 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = rng.gen_range(-2.0..2.0);
        let t = rng.gen_range(0.1..2.5);
        let a = solve_source_1d(&f, x, t, &cfg).unwrap().u;
        let b = solve_source_duhamel(&f, x, t, &cfg).unwrap().u;
        worst = worst.max((a - b).abs());
    }
    outcome(worst <= 1e-9, format!("max abs difference {worst:.2e} at 50 random (x, t)"))
}

fn huygens_tail() -> Outcome {
    let r = 0.5;
    let t_grid: Vec<f64> = [2.2, 3.0, 5.0, 8.0].iter().map(|c: &f64| (1.0 + c * r).ln()).collect();
    let rows = huygens_tail_probe(&Radial(Bump::new(r)), &t_grid, &SphericalMeanCfg::new(QuadratureConfig::composite(1e-10, 1e-8))).unwrap();
    let ok = rows.iter().all(|row| row.t.exp_m1() > 2.0 * r && row.u_desitter.abs() > 10.0 * row.est_err && row.u_flat.abs() <= row.est_err);
    let min_snr = rows.iter().map(|row| row.u_desitter.abs() / row.est_err).fold(f64::INFINITY, f64::min);
    let max_flat = rows.iter().map(|row| row.u_flat.abs()).fold(0.0, f64::max);
    outcome(ok, format!("{} times, min |u|/est_err {min_snr:.1e}, max |u_flat| {max_flat:.1e}", rows.len()))
}

fn bound_audits() -> Outcome {
    let start = Instant::now();
    let cfg = default_quadrature();
    let grid = default_z_grid();
    let mut ok = true;
    let mut parts = Vec::new();
    for bound in KernelBound::ALL {
        let mut sups = Vec::new();
        for &param in bound.default_params() {
            let r = audit_bound(bound, param, &grid, &cfg).unwrap();
            let worst = recheck(&r, 10, 5, &cfg).unwrap();
            ok &= r.stable && r.sup_ratio.is_finite() && worst <= 1.05;
            sups.push(format!("{param}: {:.3}", r.sup_ratio));
        }
        parts.push(format!("{} {{{}}}", bound.name(), sups.join(", ")));
    }
    let t: Vec<f64> = (0..40).map(|i| 0.1 + 4.9 * i as f64 / 39.0).collect();
    let c = audit_k0_mass(&t, &cfg).unwrap();
    ok &= c.stable;
    parts.push(format!("k0 L1 norm sup {:.4} (refined {:.4})", c.sup, c.refined_sup));
    outcome(
        ok,
        format!("sup ratios stable to {STABILITY_TOL} under refinement; {}; {:.2} s", parts.join("; "), start.elapsed().as_secs_f64()),
    )
}

fn decay_audits() -> Outcome {
    let start = Instant::now();
    let settings = AuditSettings::default();
    let tg = default_t_grid();
    let mut runs: Vec<(DecayEstimate, Datum, DecayConfig, f64)> = Vec::new();
    let line = |p: f64, q: f64, rho: f64| DecayConfig { n: 1, p, q, s: 0.0, rho, t_grid: tg.clone() };
    runs.push((DecayEstimate::LineSource, Datum::Source, line(2.0, 6.0, 1.5), 0.25));
    runs.push((DecayEstimate::LineSource, Datum::Source, line(2.0, 2.0, 1.0), 0.25));
    for datum in [Datum::Position, Datum::Velocity] {
        runs.push((DecayEstimate::LineLqLq, datum, line(2.0, 2.0, 1.0), 0.25));
        runs.push((DecayEstimate::LineLpLq, datum, line(2.0, 2.0, 1.0), 0.25));
        runs.push((DecayEstimate::LineLpLq, datum, line(2.0, 6.0, 1.5), 0.25));
    }
    for n in [2, 3] {
        let k = if n == 2 { 0.05 } else { 0.25 };
        for (p, q, s) in admissible_exponents(n, &[4.0 / 3.0, 1.6], 2) {
            let cfg = DecayConfig { n, p, q, s, rho: 1.0, t_grid: tg.clone() };
            runs.push((DecayEstimate::Source, Datum::Source, cfg.clone(), k));
            runs.push((DecayEstimate::Cauchy, Datum::Position, cfg.clone(), k));
            runs.push((DecayEstimate::Cauchy, Datum::Velocity, cfg, k));
        }
    }
    let mut ok = true;
    let mut worst_drift = 0.0f64;
    let mut failures = Vec::new();
    for (est, datum, cfg, k) in &runs {
        let r = audit_cauchy_decay(*est, *datum, cfg, &Gaussian::new(*k), &settings).unwrap();
        let drift = r.drift(DRIFT_SPLIT);
        worst_drift = worst_drift.max(drift);
        let good = r.admissible && r.sup_ratio.is_finite() && r.sup_ratio > 0.0 && drift < DRIFT_TOL;
        if !good {
            failures.push(format!("{} {:?} n={} p={} s={}: sup {:.3e} drift {drift:.3}", est.name(), datum, cfg.n, cfg.p, cfg.s, r.sup_ratio));
        }
        ok &= good;
    }
    let el = start.elapsed();
    ok &= within(el, 900.0);
    outcome(
        ok,
        format!("{} audits, worst drift {worst_drift:.2e}, {:.1} s{}", runs.len(), el.as_secs_f64(), if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join("; ")) }),
    )
}

fn special_functions() -> Outcome {
    let reference = 2.0 / PI * 1.8540746773;
    let e0 = (hyp_half(0.5).unwrap() - reference).abs();
    let mut overlap = 0.0f64;
    // Power series against the AGM.
    for z in [0.05, 0.2, 0.4, 0.6] {
        overlap = overlap.max((gauss_series(0.5, 0.5, 1.0, z, 400).value - hyp_half(z).unwrap()).abs());
        overlap = overlap.max((gauss_series(-0.5, 0.5, 1.0, z, 400).value - hyp_minus_half(z).unwrap()).abs());
    }
    // Logarithmic expansion against the AGM.
    for w in [0.09, 0.05, 1e-2, 1e-4, 1e-8] {
        let arg = HyperArg::with_complement(1.0 - w, w);
        overlap = overlap.max((hyp_log_expansion(0.5, 0.5, 1.0, arg, 40).unwrap().value - hyp_half(arg).unwrap()).abs());
        let (p, m) = hyp_pair(arg);
        let (pl, ml, _) = hyp_pair_log(arg, 40);
        overlap = overlap.max((p - pl).abs() / p).max((m - ml).abs());
    }
    outcome(e0 <= 1e-12 && overlap <= 1e-9, format!("F(1/2,1/2;1;1/2) off by {e0:.1e}; max route disagreement {overlap:.1e}"))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 12] = [
        ("kernel mass identities", kernel_masses),
        ("propagator identity ledger", identity_ledger_check),
        ("Riemann function conditions", riemann_conditions),
        ("interior residual of the propagator", interior_residual),
        ("closed form vs finite differences, line", || fd_agreement(1)),
        ("closed form vs finite differences, radial R^3", || fd_agreement(3)),
        ("exact solutions for constant data", special_solutions),
        ("two source representations agree", source_routes),
        ("Huygens tail in R^3", huygens_tail),
        ("kernel integral bounds", bound_audits),
        ("decay estimates", decay_audits),
        ("special functions", special_functions),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("{tag} [{:>2}] {name}: {} ({:.2} s)", i + 1, result.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
