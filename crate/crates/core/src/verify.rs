//! Self-contained verification suites over the whole pipeline.

use crate::forward::{farfield_matrix, ForwardMethod, MfsOptions, ObstacleCurve, Scene};
use crate::geom::PlanePoint;
use crate::herglotz::{disc_grid, herglotz_closed_form, residual_tail, truncation_error_sweep, DensitySpec};
use crate::indicator::normalization_check;
use crate::specfun::{jhat, ln_gamma, ml_pair, MLOrder, ScheduleParams};
use crate::vekua::{asymptotic_outside, ml_directional, ml_modified, remainder_bound_check, vekua_transform, ConeSpec};
use crate::{Error, Result, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::f64::consts::TAU;

/// Suite names accepted by [`run_suites`].
pub const SUITES: [&str; 8] = [
    "jhat-bound",
    "series-identity",
    "plane-wave",
    "truncation-envelope",
    "ml-asymptotics",
    "remainder-bounds",
    "reciprocity",
    "normalization",
];

type JhatFn = dyn Fn(u32, f64) -> f64 + Sync;

/// Inputs shared by the suites; Ĵ is injectable so that a corrupted kernel can be
/// shown to be caught.
pub struct VerifyContext {
    pub jhat: Box<JhatFn>,
    pub seed: u64,
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self { jhat: Box::new(|m, t| jhat(m, t).unwrap_or(f64::NAN)), seed: 0 }
    }
}

/// One measured quantity and the limit it is held to.
#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// True when value must be at most limit, false when at least.
    pub upper: bool,
}

impl Measurement {
    fn max(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, upper: true }
    }

    fn min(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, upper: false }
    }

    pub fn pass(&self) -> bool {
        if self.upper {
            self.value <= self.limit
        } else {
            self.value >= self.limit
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub measurements: Vec<Measurement>,
}

fn suite(name: &str, measurements: Vec<Measurement>) -> SuiteResult {
    SuiteResult { name: name.into(), pass: measurements.iter().all(|m| m.pass()), measurements }
}

/// Runs every suite, or only `only` when given.
pub fn run_suites(ctx: &VerifyContext, only: Option<&str>) -> Result<Vec<SuiteResult>> {
    if let Some(name) = only {
        if !SUITES.contains(&name) {
            return Err(Error::Precondition(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))));
        }
    }
    SUITES.iter().filter(|s| only.is_none_or(|o| o == **s)).map(|s| run_suite(ctx, s)).collect()
}

fn run_suite(ctx: &VerifyContext, name: &str) -> Result<SuiteResult> {
    match name {
        "jhat-bound" => jhat_bound(ctx),
        "series-identity" => series_identity(ctx),
        "plane-wave" => plane_wave(),
        "truncation-envelope" => truncation_envelope(),
        "ml-asymptotics" => ml_asymptotics(),
        "remainder-bounds" => remainder_bounds(),
        "reciprocity" => reciprocity(),
        "normalization" => normalization(ctx),
        _ => unreachable!("suite names are checked"),
    }
}

/// max |Ĵ_m(t)| over m ≤ 60, t = 0, 0.1, ..., 50.
pub fn jhat_bound(ctx: &VerifyContext) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for m in 0..=60 {
        for i in 0..=500 {
            let v = (ctx.jhat)(m, 0.1 * i as f64);
            worst = worst.max(if v.is_finite() { v.abs() } else { f64::INFINITY });
        }
    }
    Ok(suite("jhat-bound", vec![Measurement::max("max |jhat|", worst, 1.0 + 1e-13)]))
}

/// The full Bessel series Σ_m (sr/2)^m/Γ(m/n+1) Ĵ_m(kr) e^{im(θ−θ_ω)} with a given Ĵ.
fn bessel_series(ctx: &VerifyContext, n: MLOrder, d: PlanePoint, s: f64, k: f64, omega: PlanePoint) -> Result<C64> {
    let r = d.r();
    if r == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let half = 0.5 * s * r;
    let unit = C64::from_polar(1.0, d.theta() - omega.theta());
    let peak = half.powi(n.n() as i32);
    let mut sum = C64::new(0.0, 0.0);
    let mut best = f64::NEG_INFINITY;
    for m in 0u32.. {
        let l = m as f64 * half.ln() - ln_gamma(m as f64 / n.n() as f64 + 1.0)?;
        best = best.max(l);
        sum += (ctx.jhat)(m, k * r) * l.exp() * unit.powu(m);
        if m as f64 / n.n() as f64 > peak + 1.0 && l < best - 46.0 {
            break;
        }
    }
    Ok(sum)
}

/// Closed form plus tail, and the Bessel series, against the directional E^k.
pub fn series_identity(ctx: &VerifyContext) -> Result<SuiteResult> {
    let (k, radius) = (2.0, 1.0);
    let y = PlanePoint::new(0.1, -0.2);
    let omega = PlanePoint::unit(0.7);
    let mut lib = 0.0f64;
    let mut ser = 0.0f64;
    for n in 1..=3 {
        let o = MLOrder::new(n)?;
        let sch = ScheduleParams::new(0.5, radius, o)?;
        for big_n in [4, 8, 16] {
            let spec = DensitySpec::new(ConeSpec::new(y, omega, o)?, big_n, sch, k)?;
            for i in 0..5 {
                for j in 0..5 {
                    let d = PlanePoint::unit(TAU * j as f64 / 5.0 + 0.3) * (2.0 * radius * (i + 1) as f64 / 5.0);
                    let e = ml_directional(o, d, spec.s(), k, omega)?;
                    let h = herglotz_closed_form(&spec, y + d)? + residual_tail(&spec, y + d)?;
                    lib = lib.max((h - e).norm() / e.norm());
                    ser = ser.max((bessel_series(ctx, o, d, spec.s(), k, omega)? - e).norm() / e.norm());
                }
            }
        }
    }
    Ok(suite(
        "series-identity",
        vec![Measurement::max("closed form + tail rel err", lib, 1e-9), Measurement::max("bessel series rel err", ser, 1e-9)],
    ))
}

/// Vekua transform of e^{ikφ̄z/2} + e^{ikφz̄/2} − 1 against e^{ikx·φ}.
pub fn plane_wave() -> Result<SuiteResult> {
    let i = C64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, 5.0] {
        for j in 0..8 {
            let phi = PlanePoint::unit(TAU * j as f64 / 8.0);
            let pz = phi.z();
            let v = |p: PlanePoint| {
                let z = p.z();
                (i * k * pz.conj() * z / 2.0).exp() + (i * k * pz * z.conj() / 2.0).exp() - 1.0
            };
            for x in disc_grid(2.0, 9) {
                let u = vekua_transform(v, x, k)?;
                worst = worst.max((u - C64::from_polar(1.0, k * x.dot(&phi))).norm());
            }
        }
    }
    Ok(suite("plane-wave", vec![Measurement::max("max rel err", worst, 1e-8)]))
}

/// Sup-norm truncation error of Hg_N stays under C N^{3/2} e^{N(γ/e + log γ)}.
pub fn truncation_envelope() -> Result<SuiteResult> {
    let o = MLOrder::new(1)?;
    let spec = DensitySpec::new(ConeSpec::new(PlanePoint::ORIGIN, PlanePoint::unit(0.0), o)?, 10, ScheduleParams::new(0.5, 1.0, o)?, 2.0)?;
    let ns: Vec<u32> = (10..=30).collect();
    let rep = truncation_error_sweep(&spec, &ns, &disc_grid(2.0, 9))?;
    let last = rep.rows.last().expect("nonempty sweep");
    Ok(suite(
        "truncation-envelope",
        vec![
            Measurement::max("error / envelope at N = 30", (last.sup_error + last.sup_grad_error) / (rep.constant * last.envelope), 1.0),
            Measurement::max("fitted slope", rep.slope, 0.0),
        ],
    ))
}

/// Growth inside and decay outside the sector for n = 2, k = 2.
pub fn ml_asymptotics() -> Result<SuiteResult> {
    let (o, k) = (MLOrder::new(2)?, 2.0);
    let inside = PlanePoint::new(1.0, 0.0);
    let outside = PlanePoint::new(-1.0, 0.0);
    let mut ms = Vec::new();
    for tau in [8.0, 12.0] {
        let g = ml_modified(o, inside, tau, k)?.norm().ln() / (tau * tau);
        ms.push(Measurement::min(&format!("log|E|/tau^2 at tau={tau} (lower)"), g, 0.95));
        ms.push(Measurement::max(&format!("log|E|/tau^2 at tau={tau} (upper)"), g, 1.05));
    }
    let a = ml_modified(o, outside, 1e3, k)?.norm();
    let b = ml_modified(o, outside, 1e4, k)?.norm();
    ms.push(Measurement::max("|E(1e4)| / |E(1e3)|", b / a, 1.0 - 1e-12));
    let ratio = (ml_modified(o, outside, 1e5, k)? / asymptotic_outside(o, outside, 1e5, k)?).norm();
    ms.push(Measurement::min("E / leading term at 1e5 (lower)", ratio, 0.8));
    ms.push(Measurement::max("E / leading term at 1e5 (upper)", ratio, 1.2));
    Ok(suite("ml-asymptotics", ms))
}

/// Sample points for the remainder checks, small enough that E_{1/2}(100 z) stays finite.
pub const REMAINDER_POINTS: [PlanePoint; 5] = [
    PlanePoint::new(0.2, 0.1),
    PlanePoint::new(-0.3, 0.2),
    PlanePoint::new(0.1, -0.25),
    PlanePoint::new(-0.2, -0.2),
    PlanePoint::new(0.05, 0.3),
];

/// Remainder bounds for f = exp and f = E_{1/2} at τ ∈ {10, 100}.
pub fn remainder_bounds() -> Result<SuiteResult> {
    let half = MLOrder::new(2)?;
    let mut worst = 0.0f64;
    let mut failures = 0.0;
    for tau in [10.0, 100.0] {
        for x in REMAINDER_POINTS {
            let reps = [
                remainder_bound_check(|z| Ok((z.exp(), z.exp())), x, tau, 2.0)?,
                remainder_bound_check(|z| ml_pair(half, z), x, tau, 2.0)?,
            ];
            for r in reps {
                worst = worst.max(r.r.norm() / (r.bound_r + r.slack));
                for j in 0..2 {
                    worst = worst.max(r.r_grad[j].norm() / (r.bound_r_grad[j] + r.slack));
                }
                if !r.pass() {
                    failures += 1.0;
                }
            }
        }
    }
    Ok(suite(
        "remainder-bounds",
        vec![Measurement::max("max remainder / bound", worst, 1.0), Measurement::max("failed cases", failures, 0.0)],
    ))
}

/// Reciprocity, unitarity and the MFS/analytic agreement on the reference disc.
pub fn reciprocity() -> Result<SuiteResult> {
    let scene = Scene::new(vec![ObstacleCurve::disc(PlanePoint::new(0.5, 0.0), 0.3)?], 2.0, 2.0)?;
    let (a, _) = farfield_matrix(&scene, 64, ForwardMethod::Analytic, MfsOptions::default())?;
    let (b, _) = farfield_matrix(&scene, 64, ForwardMethod::Mfs, MfsOptions::default())?;
    let diff = a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / a.max_abs();
    Ok(suite(
        "reciprocity",
        vec![
            Measurement::max("analytic reciprocity", a.reciprocity_residual(), 1e-6),
            Measurement::max("mfs reciprocity", b.reciprocity_residual(), 1e-6),
            Measurement::max("mfs unitarity defect", b.unitarity_defect(), 1e-6),
            Measurement::max("mfs vs analytic", diff, 1e-4),
        ],
    ))
}

/// (Φ_y, g) = 1 for 50 seeded random probes.
pub fn normalization(ctx: &VerifyContext) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let o = MLOrder::new(rng.random_range(1..=3))?;
        let big_n = rng.random_range(4..=12);
        let y = PlanePoint::unit(rng.random_range(0.0..TAU)) * rng.random_range(0.0..1.9);
        let w = PlanePoint::unit(rng.random_range(0.0..TAU));
        let spec = DensitySpec::new(ConeSpec::new(y, w, o)?, big_n, ScheduleParams::new(0.5, 2.0, o)?, 2.0)?;
        worst = worst.max(normalization_check(&spec, spec.quadrature_nodes())?.residual);
    }
    Ok(suite("normalization", vec![Measurement::max("max |(Phi_y, g) - 1|", worst, 1e-12)]))
}
