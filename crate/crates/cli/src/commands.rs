//! Subcommand implementations; each returns the process exit code on success.

use crate::config::Pair;
use clap::{Args, ValueEnum};
use enclosure::forward::{farfield_matrix, load_matrix, min_nodes, neumann_eigen_guard, FarFieldMatrix, ForwardMethod, MfsOptions, Scene};
use enclosure::geom::PlanePoint;
use enclosure::herglotz::{herglotz_closed_form, DensitySpec};
use enclosure::indicator::{map_csv, map_pgm, trace_csv, visible_scan, GridSpec, ModalForm, ScanConfig, DEFAULT_DELTA};
use enclosure::specfun::{ml_pair, MLOrder, ScheduleParams};
use enclosure::vekua::{ml_modified, ConeSpec};
use enclosure::verify::{run_suites, VerifyContext};
use enclosure::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Precondition(format!("missing required option --{flag}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn complex_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Auto,
    Analytic,
    Mfs,
}

impl From<MethodArg> for ForwardMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => ForwardMethod::Auto,
            MethodArg::Analytic => ForwardMethod::Analytic,
            MethodArg::Mfs => ForwardMethod::Mfs,
        }
    }
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardArgs {
    /// Scene JSON file.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Number of far-field nodes M (even); defaults to the smallest admissible count.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Solver [default: auto].
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Output matrix file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gaussian noise level relative to max|F| [default: 0].
    #[arg(long)]
    pub noise: Option<f64>,
}

/// Writes the far-field matrix and prints a JSON summary.
pub fn forward(a: ForwardArgs, seed: u64) -> Result<i32> {
    let scene = Scene::load(&need(a.scene, "scene")?)?;
    let out = need(a.out, "out")?;
    let noise = a.noise.unwrap_or(0.0);
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Precondition(format!("noise level must be nonnegative, got {noise}")));
    }
    let m = a.nodes.unwrap_or_else(|| min_nodes(scene.k, scene.radius));
    let method = a.method.unwrap_or(MethodArg::Auto).into();
    let guard = neumann_eigen_guard(&scene);
    let (mut f, report) = farfield_matrix(&scene, m, method, MfsOptions::default())?;
    if noise > 0.0 {
        f.add_noise(noise, seed);
    }
    let text = f.to_text();
    write_file(&out, text.as_bytes())?;
    if guard.warning {
        eprintln!("warning: k is within {} of a Neumann eigenvalue of an obstacle", guard.threshold);
    }
    let crc = text.lines().last().and_then(|l| l.strip_prefix("crc32=")).unwrap_or_default();
    let summary = json!({
        "matrix": out,
        "M": f.m,
        "k": f.k,
        "provenance": f.provenance,
        "crc32": crc,
        "noise": noise,
        "reciprocity_residual": f.reciprocity_residual(),
        "unitarity_defect": f.unitarity_defect(),
        "solver": report,
        "eigen_guard": guard,
    });
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?);
    Ok(0)
}

/// Matrix plus the wave number and radius it is probed with.
fn probe_setup(matrix: Option<PathBuf>, scene: Option<PathBuf>, k: Option<f64>, radius: Option<f64>) -> Result<(FarFieldMatrix, f64)> {
    let f = load_matrix(&need(matrix, "matrix")?)?;
    let scene = scene.map(|p| Scene::load(&p)).transpose()?;
    if let (Some(k), Some(s)) = (k, &scene) {
        if k != s.k {
            return Err(Error::Consistency(format!("--k {k} differs from the scene wave number {}", s.k)));
        }
    }
    let k = k.or(scene.as_ref().map(|s| s.k)).unwrap_or(f.k);
    if k != f.k {
        return Err(Error::Consistency(format!("matrix wave number {} differs from the configured wave number {k}", f.k)));
    }
    let radius = need(radius.or(scene.as_ref().map(|s| s.radius)), "radius (or --scene)")?;
    Ok((f, radius))
}

fn n_range(lo: Option<u32>, hi: Option<u32>) -> Vec<u32> {
    (lo.unwrap_or(8)..=hi.unwrap_or(24)).collect()
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeArgs {
    /// Far-field matrix file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Scene JSON supplying k and R.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Wave number; must agree with the matrix.
    #[arg(long)]
    pub k: Option<f64>,
    /// Radius R of the disc containing the obstacles.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Cone apex as x1,x2 [default: 0,0].
    #[arg(long, allow_hyphen_values = true)]
    pub apex: Option<Pair>,
    /// Cone axis angle in radians [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Order n of the cone, half-aperture π/(2n) [default: 1].
    #[arg(long)]
    pub n: Option<u32>,
    /// Schedule constant γ [default: 0.5].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Smallest truncation level N [default: 8].
    #[arg(long)]
    pub n_min: Option<u32>,
    /// Largest truncation level N [default: 24].
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Slope dead-band of the classifier [default: 0.05].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Trace CSV output; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Indicator trace of one cone probe.
pub fn probe(a: ProbeArgs) -> Result<i32> {
    let (f, radius) = probe_setup(a.matrix, a.scene, a.k, a.radius)?;
    let n = MLOrder::new(a.n.unwrap_or(1))?;
    let apex = a.apex.unwrap_or(Pair([0.0, 0.0])).0;
    let cone = ConeSpec::new(PlanePoint::new(apex[0], apex[1]), PlanePoint::unit(a.omega.unwrap_or(0.0)), n)?;
    let schedule = ScheduleParams::new(a.gamma.unwrap_or(0.5), radius, n)?;
    let trace = ModalForm::new(&f, radius)?.trace(cone, schedule, &n_range(a.n_min, a.n_max), a.delta.unwrap_or(DEFAULT_DELTA))?;
    let csv = trace_csv(&trace);
    match a.out {
        Some(p) => write_file(&p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    println!("classification={:?} slope={:.6e}", trace.classification, trace.slope);
    Ok(0)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    /// Far-field matrix file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Scene JSON supplying k and R.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Wave number; must agree with the matrix.
    #[arg(long)]
    pub k: Option<f64>,
    /// Radius R of the disc containing the obstacles.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Half-width of the square grid centred at the origin [default: 0.7 R].
    #[arg(long)]
    pub half: Option<f64>,
    /// Points per grid side [default: 21].
    #[arg(long)]
    pub count: Option<usize>,
    /// Number of equispaced probe directions [default: 16].
    #[arg(long)]
    pub omegas: Option<usize>,
    /// Cone orders tried at each direction [default: 1,2].
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<u32>>,
    /// Schedule constant γ [default: 0.5].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Smallest truncation level N [default: 8].
    #[arg(long)]
    pub n_min: Option<u32>,
    /// Largest truncation level N [default: 24].
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Slope dead-band of the classifier [default: 0.05].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Map CSV output.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Map PGM output.
    #[arg(long)]
    pub out_pgm: Option<PathBuf>,
}

/// Visibility map over a square grid.
pub fn scan(a: ScanArgs) -> Result<i32> {
    let (f, radius) = probe_setup(a.matrix, a.scene, a.k, a.radius)?;
    let out_csv = need(a.out_csv, "out-csv")?;
    let cfg = ScanConfig {
        grid: GridSpec::square(a.half.unwrap_or(0.7 * radius), a.count.unwrap_or(21)),
        omega_count: a.omegas.unwrap_or(16),
        n_list: a.orders.unwrap_or_else(|| vec![1, 2]),
        gamma: a.gamma.unwrap_or(0.5),
        ns: n_range(a.n_min, a.n_max),
        delta: a.delta.unwrap_or(DEFAULT_DELTA),
    };
    let last = AtomicUsize::new(0);
    let progress = |done: usize, total: usize| {
        let pct = done * 100 / total;
        if pct >= last.load(Ordering::Relaxed) + 10 || done == total {
            last.fetch_max(pct, Ordering::Relaxed);
            eprintln!("scan: {done}/{total} points");
        }
    };
    let map = visible_scan(&f, f.k, radius, &cfg, Some(&progress))?;
    write_file(&out_csv, map_csv(&map).as_bytes())?;
    if let Some(p) = a.out_pgm {
        write_file(&p, &map_pgm(&map))?;
    }
    println!("visible={} of {}", map.visible_count(), map.points.len());
    Ok(0)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Run only the named suite.
    #[arg(long)]
    pub suite: Option<String>,
}

/// Runs the invariant suites; exit 1 when any fails.
pub fn verify(a: VerifyArgs, seed: u64) -> Result<i32> {
    let ctx = VerifyContext { seed, ..Default::default() };
    let results = run_suites(&ctx, a.suite.as_deref())?;
    let mut stdout = std::io::stdout().lock();
    for r in &results {
        let _ = writeln!(stdout, "{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
        for m in &r.measurements {
            let op = if m.upper { "<=" } else { ">=" };
            let _ = writeln!(stdout, "    {} = {:.6e} ({op} {:.3e})", m.name, m.value, m.limit);
        }
    }
    Ok(if results.iter().all(|r| r.pass) { 0 } else { 1 })
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlEvalArgs {
    /// Order n, α = 1/n [default: 1].
    #[arg(long)]
    pub n: Option<u32>,
    /// Evaluation point x as x1,x2.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<Pair>,
    /// Scale parameter τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Wave number [default: 1].
    #[arg(long)]
    pub k: Option<f64>,
    /// Truncation level N of the Herglotz approximation [default: 8].
    #[arg(long)]
    pub big_n: Option<u32>,
    /// Cone apex of the Herglotz approximation [default: 0,0].
    #[arg(long, allow_hyphen_values = true)]
    pub apex: Option<Pair>,
    /// Cone axis angle in radians [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Schedule constant γ [default: 0.5].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Schedule radius R [default: 1].
    #[arg(long)]
    pub radius: Option<f64>,
}

/// Prints E_α(τz), E_α^k(x;τ) and the Herglotz approximation at x.
pub fn ml_eval(a: MlEvalArgs) -> Result<i32> {
    let n = MLOrder::new(a.n.unwrap_or(1))?;
    let x = need(a.x, "x")?.0;
    let x = PlanePoint::new(x[0], x[1]);
    let tau = need(a.tau, "tau")?;
    let k = a.k.unwrap_or(1.0);
    let (e, de) = ml_pair(n, C64::new(tau * x.x1, tau * x.x2))?;
    let modified = ml_modified(n, x, tau, k)?;
    let apex = a.apex.unwrap_or(Pair([0.0, 0.0])).0;
    let cone = ConeSpec::new(PlanePoint::new(apex[0], apex[1]), PlanePoint::unit(a.omega.unwrap_or(0.0)), n)?;
    let spec = DensitySpec::new(cone, a.big_n.unwrap_or(8), ScheduleParams::new(a.gamma.unwrap_or(0.5), a.radius.unwrap_or(1.0), n)?, k)?;
    let hg = herglotz_closed_form(&spec, x)?;
    let out = json!({
        "alpha": n.alpha(),
        "x": [x.x1, x.x2],
        "tau": tau,
        "k": k,
        "mittag_leffler": complex_json(e),
        "mittag_leffler_deriv": complex_json(de),
        "modified": complex_json(modified),
        "herglotz": { "N": spec.big_n, "s": spec.s(), "value": complex_json(hg) },
    });
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| Error::Format(e.to_string()))?);
    Ok(0)
}
