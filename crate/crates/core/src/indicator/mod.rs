//! The indicator I = (F g, g) over a truncation sweep, its growth/decay
//! classification and the visible-part scan.

mod modal;
mod output;
mod scan;

pub use modal::ModalForm;
pub use output::{map_csv, map_pgm, trace_csv};
pub use scan::{visible_scan, GridSpec, ScanConfig, Verdict, VisibilityMap, Witness};

use crate::forward::{FarFieldMatrix, ObstacleCurve};
use crate::geom::PlanePoint;
use crate::herglotz::{density_coeffs, density_eval, sobolev_half_norm, DensityCoeffs, DensitySpec};
use crate::specfun::{bessel_j_seq, MLOrder, ScheduleParams};
use crate::vekua::ConeSpec;
use crate::{Error, Result, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default slope dead-band.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Floor applied to |I| before taking logarithms.
pub const ABS_CLAMP: f64 = 1e-300;

/// Decay/growth verdict of one probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Decay,
    Growth,
    Indeterminate,
}

/// Indicator values over increasing truncation levels.
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorTrace {
    pub probe: ConeSpec,
    pub ns: Vec<u32>,
    pub s: Vec<f64>,
    pub values: Vec<C64>,
    pub abs: Vec<f64>,
    /// Entries whose |I| was raised to the clamp.
    pub clamped: Vec<bool>,
    pub classification: Classification,
    pub slope: f64,
}

fn check_consistency(f: &FarFieldMatrix, k: f64) -> Result<()> {
    if f.k != k {
        return Err(Error::Consistency(format!("matrix wave number {} differs from probe wave number {k}", f.k)));
    }
    Ok(())
}

fn check_resolution(f: &FarFieldMatrix, spec: &DensitySpec) -> Result<()> {
    let need = spec.quadrature_nodes();
    if f.m < need {
        return Err(Error::Resolution(format!(
            "matrix has {} nodes but nN = {} needs at least {need}; regenerate the far-field matrix",
            f.m,
            spec.degree()
        )));
    }
    Ok(())
}

/// (2π/M)² Σ_{i,j} F[i][j] g(φ_j) conj(g(φ_i)), summed row-major.
pub fn indicator_value(f: &FarFieldMatrix, spec: &DensitySpec) -> Result<C64> {
    check_consistency(f, spec.k)?;
    check_resolution(f, spec)?;
    let c = density_coeffs(spec)?;
    Ok(indicator_from_coeffs(f, &c, spec.probe.apex))
}

/// Direct double trapezoid for arbitrary density coefficients about apex y.
pub fn indicator_from_coeffs(f: &FarFieldMatrix, c: &DensityCoeffs, y: PlanePoint) -> C64 {
    let g: Vec<C64> = f.nodes().iter().map(|&p| density_eval(c, y, f.k, p)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..f.m {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..f.m {
            row += f.get(i, j) * g[j];
        }
        acc += row * g[i].conj();
    }
    acc * (TAU / f.m as f64).powi(2)
}

/// Least-squares slope over the upper half of the range, ignoring clamped
/// entries, and the resulting classification.
pub fn classify(ns: &[u32], abs: &[f64], clamped: &[bool], delta: f64) -> (Classification, f64) {
    if abs.iter().all(|&a| a == 0.0) {
        return (Classification::Decay, f64::NEG_INFINITY);
    }
    let start = ns.len() / 2;
    let pts: Vec<(f64, f64)> = (start..ns.len()).filter(|&i| !clamped[i]).map(|i| (ns[i] as f64, abs[i].ln())).collect();
    if pts.len() < 2 {
        return (Classification::Indeterminate, f64::NAN);
    }
    let slope = crate::herglotz::least_squares_slope(&pts);
    let class = if slope < -delta {
        Classification::Decay
    } else if slope > delta {
        Classification::Growth
    } else {
        Classification::Indeterminate
    };
    (class, slope)
}

fn validate_ns(ns: &[u32]) -> Result<()> {
    if ns.len() < 5 {
        return Err(Error::Precondition(format!("N range needs at least 5 values, got {}", ns.len())));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] == 0 {
        return Err(Error::Precondition("N values must be positive and increasing".into()));
    }
    Ok(())
}

/// Indicator over `ns` with s = s(N), evaluated through the band-limited form of F.
pub fn indicator_trace(
    f: &FarFieldMatrix,
    probe: ConeSpec,
    schedule: ScheduleParams,
    k: f64,
    ns: &[u32],
    delta: f64,
) -> Result<IndicatorTrace> {
    check_consistency(f, k)?;
    ModalForm::new(f, schedule.radius)?.trace(probe, schedule, ns, delta)
}

/// Result of the normalization identity check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormalizationReport {
    /// |Q(Φ_y g) − 1| with the M-node trapezoid rule applied termwise.
    pub residual: f64,
    /// Same quantity from node samples of g in floating point.
    pub sampled_residual: f64,
    /// 2π Σ |β_m|, the size of the cancelling node values.
    pub cancellation_scale: f64,
}

/// (Φ_y, g) − 1 by the M-node trapezoid rule.
///
/// The product Φ_y g is the polynomial Σ β_m φ^m, whose trapezoid sum uses
/// Σ_j φ_j^m = M·[M | m] exactly; the floating-point node sum is reported
/// alongside, since its rounding error scales with Σ |β_m|.
pub fn normalization_check(spec: &DensitySpec, m: usize) -> Result<NormalizationReport> {
    if m == 0 {
        return Err(Error::Precondition("need at least one node".into()));
    }
    let c = density_coeffs(spec)?;
    let aliased: C64 = c.beta.iter().enumerate().filter(|(j, _)| j % m == 0).map(|(_, b)| b).sum();
    let residual = (aliased * TAU - 1.0).norm();
    let y = spec.probe.apex;
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..m {
        let phi = PlanePoint::unit(TAU * j as f64 / m as f64);
        sum += C64::from_polar(1.0, spec.k * y.dot(&phi)) * density_eval(&c, y, spec.k, phi);
    }
    let sampled_residual = (sum * (TAU / m as f64) - 1.0).norm();
    let cancellation_scale = TAU * c.beta.iter().map(|b| b.norm()).sum::<f64>();
    Ok(NormalizationReport { residual, sampled_residual, cancellation_scale })
}

/// Hg(x) = Σ_m 2π β_m i^m J_m(k|x − y|) e^{imθ} for general coefficients.
pub fn herglotz_from_coeffs(c: &DensityCoeffs, y: PlanePoint, x: PlanePoint) -> Result<C64> {
    let d = x - y;
    let r = d.r();
    if r == 0.0 {
        return Ok(c.beta[0] * TAU);
    }
    let seq = bessel_j_seq((c.beta.len() - 1) as u32, c.k * r)?;
    let unit = C64::new(0.0, 1.0) * C64::from_polar(1.0, d.theta());
    let mut acc = C64::new(0.0, 0.0);
    for (m, b) in c.beta.iter().enumerate() {
        if *b == C64::new(0.0, 0.0) {
            continue;
        }
        let (lj, sj) = seq.ln_j(m as u32);
        acc += sj * (b.norm().ln() + lj).exp() * C64::from_polar(1.0, b.arg()) * unit.powu(m as u32);
    }
    Ok(acc * TAU)
}

/// One member of a density family: coefficients about an apex.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub apex: PlanePoint,
    pub coeffs: DensityCoeffs,
}

impl FamilyMember {
    pub fn from_spec(spec: &DensitySpec) -> Result<Self> {
        Ok(Self { apex: spec.probe.apex, coeffs: density_coeffs(spec)? })
    }

    /// Same density multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut c = self.coeffs.clone();
        c.beta.iter_mut().for_each(|b| *b *= factor);
        Self { apex: self.apex, coeffs: c }
    }
}

/// Bracket of |(Fg, g)| / ‖Hg|∂D‖²_{H^{1/2}} over a family.
#[derive(Debug, Clone, Serialize)]
pub struct SurrogateReport {
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub excluded: Vec<usize>,
    pub bracket: f64,
    pub pass: bool,
}

/// Ratio of the indicator to the squared H^{1/2} surrogate of the boundary trace
/// of Hg on the (single) obstacle, for each family member.
pub fn trace_surrogate_check(
    f: &FarFieldMatrix,
    curve: &ObstacleCurve,
    family: &[FamilyMember],
    samples: usize,
    bracket: f64,
) -> Result<SurrogateReport> {
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    for (i, member) in family.iter().enumerate() {
        let trace: Vec<C64> =
            curve.samples(samples).iter().map(|s| herglotz_from_coeffs(&member.coeffs, member.apex, s.point)).collect::<Result<_>>()?;
        let den = sobolev_half_norm(&trace)?;
        let scale: f64 = member.coeffs.beta.iter().map(|b| b.norm_sqr()).sum::<f64>();
        if !(den > 1e-24 * scale) || scale == 0.0 {
            excluded.push(i);
            continue;
        }
        ratios.push(indicator_from_coeffs(f, &member.coeffs, member.apex).norm() / den);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let pass = !ratios.is_empty() && max / min <= bracket;
    Ok(SurrogateReport { ratios, min, max, excluded, bracket, pass })
}

/// `count` seeded probes with apexes on the circle of radius `rho` and random
/// axes, each with order n and truncation N.
#[allow(clippy::too_many_arguments)]
pub fn probe_family(
    count: usize,
    rho: f64,
    n: MLOrder,
    big_n: u32,
    gamma: f64,
    radius: f64,
    k: f64,
    seed: u64,
) -> Result<Vec<DensitySpec>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let schedule = ScheduleParams::new(gamma, radius, n)?;
    (0..count)
        .map(|j| {
            let y = PlanePoint::unit(TAU * j as f64 / count as f64) * rho;
            let w = PlanePoint::unit(rng.random_range(0.0..TAU));
            DensitySpec::new(ConeSpec::new(y, w, n)?, big_n, schedule, k)
        })
        .collect()
}
