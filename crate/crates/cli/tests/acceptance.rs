//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use enclosure::forward::{disc_farfield, farfield_matrix, mfs_solve, ForwardMethod, MfsOptions, ObstacleCurve, Scene};
use enclosure::geom::PlanePoint;
use enclosure::herglotz::{disc_grid, herglotz_closed_form, residual_tail, truncation_error_sweep, DensitySpec};
use enclosure::indicator::{
    indicator_trace, normalization_check, probe_family, trace_surrogate_check, Classification, FamilyMember, DEFAULT_DELTA,
};
use enclosure::specfun::{jhat, ml_pair, MLOrder, ScheduleParams};
use enclosure::vekua::{asymptotic_outside, ml_directional, ml_modified, remainder_bound_check, vekua_transform, ConeSpec};
use enclosure::{Result, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::{E, PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn plane_wave_identity() -> Result<Outcome> {
    let i = C64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, 5.0] {
        for j in 0..8 {
            let phi = PlanePoint::unit(TAU * j as f64 / 8.0).z();
            let v = |p: PlanePoint| {
                let z = p.z();
                (i * k * phi.conj() * z / 2.0).exp() + (i * k * phi * z.conj() / 2.0).exp() - 1.0
            };
            for x in disc_grid(2.0, 9) {
                let exact = (i * k * (x.x1 * phi.re + x.x2 * phi.im)).exp();
                worst = worst.max((vekua_transform(v, x, k)? - exact).norm() / exact.norm());
            }
        }
    }
    outcome(worst <= 1e-8, format!("max rel err {worst:.2e} (limit 1e-8)"))
}

fn series_identity() -> Result<Outcome> {
    let (k, radius) = (2.0, 1.0);
    let y = PlanePoint::new(-0.3, 0.4);
    let omega = PlanePoint::unit(2.0);
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let o = MLOrder::new(n)?;
        for big_n in [4, 8, 16] {
            let spec = DensitySpec::new(ConeSpec::new(y, omega, o)?, big_n, ScheduleParams::new(0.5, radius, o)?, k)?;
            for a in 0..5 {
                for b in 0..5 {
                    let d = PlanePoint::unit(TAU * b as f64 / 5.0 + 0.1 * a as f64) * (2.0 * radius * (a as f64 + 0.5) / 5.0);
                    let e = ml_directional(o, d, spec.s(), k, omega)?;
                    let h = herglotz_closed_form(&spec, y + d)? + residual_tail(&spec, y + d)?;
                    worst = worst.max((h - e).norm() / e.norm());
                }
            }
        }
    }
    outcome(worst <= 1e-9, format!("max rel err {worst:.2e} (limit 1e-9)"))
}

fn truncation_slope() -> Result<Outcome> {
    let o = MLOrder::new(1)?;
    let gamma = 0.5;
    let base =
        DensitySpec::new(ConeSpec::new(PlanePoint::ORIGIN, PlanePoint::unit(0.0), o)?, 10, ScheduleParams::new(gamma, 1.0, o)?, 2.0)?;
    let ns: Vec<u32> = (10..=30).collect();
    let rep = truncation_error_sweep(&base, &ns, &disc_grid(2.0, 9))?;
    let target = gamma / E + f64::ln(gamma);
    let pass = (rep.slope - target).abs() <= 0.2 * target.abs();
    outcome(pass, format!("fitted slope {:.4} vs {target:.4} (within 20%)", rep.slope))
}

fn jhat_bound() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for m in 0..=60 {
        for i in 0..=500 {
            worst = worst.max(jhat(m, 0.1 * i as f64)?.abs());
        }
    }
    outcome(worst <= 1.0 + 1e-13, format!("max |Jhat| {worst:.16} (limit 1 + 1e-13)"))
}

fn ml_asymptotics() -> Result<Outcome> {
    let (o, k) = (MLOrder::new(2)?, 2.0);
    let inside = PlanePoint::new(1.0, 0.0);
    let outside = PlanePoint::new(-1.0, 0.0);
    let g8 = ml_modified(o, inside, 8.0, k)?.norm().ln() / 64.0;
    let g12 = ml_modified(o, inside, 12.0, k)?.norm().ln() / 144.0;
    let decay = ml_modified(o, outside, 1e4, k)?.norm() / ml_modified(o, outside, 1e3, k)?.norm();
    let lead = (ml_modified(o, outside, 1e5, k)? / asymptotic_outside(o, outside, 1e5, k)?).norm();
    let growth_ok = [g8, g12].iter().all(|g| (0.95..=1.05).contains(g));
    outcome(
        growth_ok && decay < 1.0 && (0.8..=1.2).contains(&lead),
        format!("log|E|/tau^2 = {g8:.4}, {g12:.4}; |E(1e4)|/|E(1e3)| = {decay:.4}; E/lead at 1e5 = {lead:.4}"),
    )
}

fn disc_cross_validation() -> Result<Outcome> {
    let center = PlanePoint::new(0.2, -0.1);
    let incs: Vec<PlanePoint> = (0..12).map(|j| PlanePoint::unit(TAU * j as f64 / 12.0 + 0.05)).collect();
    let obs: Vec<PlanePoint> = (0..48).map(|j| PlanePoint::unit(TAU * j as f64 / 48.0)).collect();
    let mut parts = Vec::new();
    let mut worst_all = 0.0f64;
    for ka in [1.0, 2.0, 4.0, 8.0] {
        let (a, k) = (0.5, 2.0 * ka);
        let mfs = mfs_solve(&[ObstacleCurve::disc(center, a)?], k, &incs, &obs, MfsOptions::default())?;
        let mut scale = 0.0f64;
        let mut err = 0.0f64;
        for (j, d) in incs.iter().enumerate() {
            for (i, x) in obs.iter().enumerate() {
                let exact = disc_farfield(a, center, *x, *d, k)?;
                scale = scale.max(exact.norm());
                err = err.max((mfs.values[j][i] - exact).norm());
            }
        }
        worst_all = worst_all.max(err / scale);
        parts.push(format!("ka={ka}: {:.1e}", err / scale));
    }
    outcome(worst_all <= 1e-4, format!("sup rel err {} (limit 1e-4)", parts.join(", ")))
}

fn dichotomy() -> Result<Outcome> {
    let scene = Scene::new(vec![ObstacleCurve::disc(PlanePoint::new(0.5, 0.0), 0.3)?], 2.0, 2.0)?;
    let guard = enclosure::forward::neumann_eigen_guard(&scene);
    let (f, _) = farfield_matrix(&scene, 160, ForwardMethod::Auto, MfsOptions::default())?;
    let ns: Vec<u32> = (8..=24).collect();
    let y = PlanePoint::new(-1.0, 0.0);
    let trace = |w: f64, n: u32| -> Result<(Classification, f64)> {
        let o = MLOrder::new(n)?;
        let t = indicator_trace(&f, ConeSpec::new(y, PlanePoint::unit(w), o)?, ScheduleParams::new(0.5, 2.0, o)?, 2.0, &ns, DEFAULT_DELTA)?;
        Ok((t.classification, t.slope))
    };
    let (a, sa) = trace(PI, 2)?;
    let (b, sb) = trace(0.0, 1)?;
    outcome(
        !guard.warning && a == Classification::Decay && b == Classification::Growth,
        format!("guard ok {}; miss probe {a:?} (slope {sa:.4}), hit probe {b:?} (slope {sb:.4})", !guard.warning),
    )
}

fn normalization() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let o = MLOrder::new(rng.random_range(1..=3))?;
        let y = PlanePoint::unit(rng.random_range(0.0..TAU)) * rng.random_range(0.0..1.9);
        let w = PlanePoint::unit(rng.random_range(0.0..TAU));
        let spec = DensitySpec::new(ConeSpec::new(y, w, o)?, rng.random_range(2..=16), ScheduleParams::new(0.5, 2.0, o)?, 2.0)?;
        worst = worst.max(normalization_check(&spec, spec.quadrature_nodes())?.residual);
    }
    outcome(worst <= 1e-12, format!("max |(Phi_y, g) - 1| {worst:.2e} (limit 1e-12)"))
}

fn surrogate_bracket() -> Result<Outcome> {
    let scene = Scene::new(vec![ObstacleCurve::disc(PlanePoint::new(0.5, 0.0), 0.3)?], 2.0, 2.0)?;
    let (f, _) = farfield_matrix(&scene, 160, ForwardMethod::Auto, MfsOptions::default())?;
    let family = probe_family(20, 1.4, MLOrder::new(1)?, 8, 0.5, 2.0, 2.0, 7)?;
    let members: Vec<FamilyMember> = family.iter().map(FamilyMember::from_spec).collect::<Result<_>>()?;
    let rep = trace_surrogate_check(&f, &scene.obstacles[0], &members, 256, 1e4)?;
    outcome(
        rep.pass && rep.excluded.is_empty(),
        format!("max/min {:.3e} over {} probes, {} excluded (limit 1e4)", rep.max / rep.min, rep.ratios.len(), rep.excluded.len()),
    )
}

fn remainder_bounds() -> Result<Outcome> {
    let half = MLOrder::new(2)?;
    let points = [
        PlanePoint::new(0.25, 0.05),
        PlanePoint::new(-0.1, 0.3),
        PlanePoint::new(0.15, -0.2),
        PlanePoint::new(-0.3, -0.1),
        PlanePoint::new(0.0, 0.2),
    ];
    let mut cases = 0;
    let mut failed = 0;
    let mut worst = 0.0f64;
    for tau in [10.0, 100.0] {
        for x in points {
            for r in
                [remainder_bound_check(|z| Ok((z.exp(), z.exp())), x, tau, 2.0)?, remainder_bound_check(|z| ml_pair(half, z), x, tau, 2.0)?]
            {
                cases += 1;
                failed += usize::from(!r.pass());
                worst = worst.max(r.r.norm() / (r.bound_r + r.slack));
                for j in 0..2 {
                    worst = worst.max(r.r_grad[j].norm() / (r.bound_r_grad[j] + r.slack));
                }
            }
        }
    }
    outcome(failed == 0, format!("{failed} of {cases} cases exceed the bound; max remainder/bound {worst:.3}"))
}

fn scan_determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let scene = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/disc_scene.json");
    let bin = env!("CARGO_BIN_EXE_enclosure");
    let matrix = dir.path().join("F.ffm");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("ENCLOSURE_THREADS").output();
    let fwd = run(&["forward", "--scene", scene.to_str().unwrap(), "--nodes", "160", "--out", matrix.to_str().unwrap()])?;
    if !fwd.status.success() {
        return outcome(false, "forward run failed".into());
    }
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let csv = dir.path().join(format!("map{threads}.csv"));
        let pgm = dir.path().join(format!("map{threads}.pgm"));
        let o = run(&[
            "scan",
            "--matrix",
            matrix.to_str().unwrap(),
            "--scene",
            scene.to_str().unwrap(),
            "--threads",
            threads,
            "--out-csv",
            csv.to_str().unwrap(),
            "--out-pgm",
            pgm.to_str().unwrap(),
        ])?;
        if !o.status.success() {
            return outcome(false, format!("scan with {threads} threads failed"));
        }
        outputs.push((std::fs::read(csv)?, std::fs::read(pgm)?));
    }
    outcome(outputs[0] == outputs[1], format!("21x21 map CSV and PGM identical: {}", outputs[0] == outputs[1]))
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("plane-wave identity", Duration::from_secs(10), plane_wave_identity),
        ("series identity", Duration::from_secs(30), series_identity),
        ("truncation slope", Duration::from_secs(60), truncation_slope),
        ("jhat bound", Duration::from_secs(5), jhat_bound),
        ("mittag-leffler growth and decay", Duration::from_secs(60), ml_asymptotics),
        ("mfs vs disc series", Duration::from_secs(60), disc_cross_validation),
        ("desk-scale dichotomy", Duration::from_secs(300), dichotomy),
        ("normalization", Duration::from_secs(5), normalization),
        ("trace-norm surrogate bracket", Duration::from_secs(60), surrogate_bracket),
        ("remainder bounds", Duration::from_secs(30), remainder_bounds),
        ("scan determinism", Duration::from_secs(300), scan_determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && took <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "criterion {:>2} {:<32} {}  {detail}  [{:.2} s, budget {} s]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
