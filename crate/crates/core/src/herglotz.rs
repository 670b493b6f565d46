//! Explicit Herglotz densities g_N(φ) = e^{−iky·φ} Σ_{m=0}^{nN} β_m φ^m and the
//! wave functions they generate.
//!
//! The Herglotz wave function of the density is the finite Bessel series
//! Hg_N(x) = Σ_{m=0}^{nN} Γ(m+1)/Γ(m/n+1) (sω̄/k)^m J_m(kr) e^{imθ} in the polar
//! coordinates (r, θ) of x − y. Terms are formed as
//! (sr/2)^m/Γ(m/n+1) Ĵ_m(kr) (ω̄ e^{iθ})^m in log-magnitude so that no factorial
//! or power overflows.

use crate::forward::ObstacleCurve;
use crate::geom::PlanePoint;
use crate::specfun::{bessel_j_seq, ln_gamma, s_schedule, BesselSeq, ScheduleParams, BESSEL_M_MAX};
use crate::vekua::ConeSpec;
use crate::{Error, Result, C64};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI, TAU};

/// Largest admissible nN.
pub const MAX_DEGREE: u32 = 4000;

/// Probe (y, ω, n), truncation level N, schedule and wave number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub probe: ConeSpec,
    pub big_n: u32,
    pub schedule: ScheduleParams,
    pub k: f64,
}

impl DensitySpec {
    pub fn new(probe: ConeSpec, big_n: u32, schedule: ScheduleParams, k: f64) -> Result<Self> {
        if big_n == 0 {
            return Err(Error::Domain("truncation level N must be positive".into()));
        }
        if probe.n != schedule.n {
            return Err(Error::Domain("probe order and schedule order differ".into()));
        }
        if probe.n.n() * big_n > MAX_DEGREE {
            return Err(Error::Range(format!("nN = {} exceeds {MAX_DEGREE}", probe.n.n() * big_n)));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("wave number must be positive, got {k}")));
        }
        Ok(Self { probe, big_n, schedule, k })
    }

    /// Polynomial degree nN of the density.
    pub fn degree(&self) -> u32 {
        self.probe.n.n() * self.big_n
    }

    /// s(N) from the schedule.
    pub fn s(&self) -> f64 {
        s_schedule(&self.schedule, self.big_n)
    }

    /// Node count 2nN + 2⌈ekR⌉ + 32 at which circle quadrature is exact to rounding.
    pub fn quadrature_nodes(&self) -> usize {
        (2 * self.degree() + 2 * (E * self.k * self.schedule.radius).ceil() as u32 + 32) as usize
    }
}

/// β_m = (1/2π) Γ(m+1)/Γ(m/n+1) (sω̄/(ik))^m for m = 0..nN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCoeffs {
    pub beta: Vec<C64>,
    pub s: f64,
    pub k: f64,
}

/// Coefficients of the truncated density; log-space with a hard error only if
/// some log-magnitude exceeds 700.
pub fn density_coeffs(spec: &DensitySpec) -> Result<DensityCoeffs> {
    let n = spec.probe.n.n() as f64;
    let s = spec.s();
    let ls = (s / spec.k).ln();
    let phase = -spec.probe.axis.theta() - 0.5 * PI;
    let beta = (0..=spec.degree())
        .map(|m| {
            let mf = m as f64;
            let lm = ln_gamma(mf + 1.0)? - ln_gamma(mf / n + 1.0)? + mf * ls - TAU.ln();
            if lm > 700.0 {
                return Err(Error::Range(format!("log |beta_{m}| = {lm} exceeds 700")));
            }
            Ok(C64::from_polar(lm.exp(), mf * phase))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityCoeffs { beta, s, k: spec.k })
}

/// g(φ) = e^{−iky·φ} Σ β_m φ^m with φ the unit complex number φ1 + iφ2.
pub fn density_eval(c: &DensityCoeffs, y: PlanePoint, k: f64, phi: PlanePoint) -> C64 {
    let p = phi.z();
    let mut pm = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for b in &c.beta {
        sum += b * pm;
        pm *= p;
    }
    C64::from_polar(1.0, -k * y.dot(&phi)) * sum
}

/// Trapezoid value of the Herglotz wave function and its aliasing diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct HgQuadrature {
    pub value: C64,
    /// |value(M) − value(2M)|.
    pub doubling_change: f64,
    pub aliasing_suspected: bool,
}

fn trapezoid_hg(c: &DensityCoeffs, y: PlanePoint, k: f64, x: PlanePoint, m: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..m {
        let phi = PlanePoint::unit(TAU * j as f64 / m as f64);
        acc += C64::from_polar(1.0, k * x.dot(&phi)) * density_eval(c, y, k, phi);
    }
    acc * (TAU / m as f64)
}

/// Hg(x) = ∫ e^{ikx·φ} g(φ) dσ by the M-point trapezoid rule, checked against 2M.
pub fn herglotz_quadrature(c: &DensityCoeffs, y: PlanePoint, k: f64, x: PlanePoint, m: usize) -> Result<HgQuadrature> {
    if m < 2 {
        return Err(Error::Precondition("at least two quadrature nodes are required".into()));
    }
    let value = trapezoid_hg(c, y, k, x, m);
    let fine = trapezoid_hg(c, y, k, x, 2 * m);
    let doubling_change = (fine - value).norm();
    let degree = c.beta.len() - 1;
    let aliasing_suspected = m < 2 * degree + 2 || doubling_change > 1e-10 * fine.norm().max(1.0);
    Ok(HgQuadrature { value, doubling_change, aliasing_suspected })
}

/// Log-magnitude of (sr/2)^m/Γ(m/n+1) and of Ĵ terms share this layout.
struct Series<'a> {
    spec: &'a DensitySpec,
    r: f64,
    unit: C64,
    bessel: BesselSeq,
}

impl<'a> Series<'a> {
    fn new(spec: &'a DensitySpec, x: PlanePoint, mmax: u32) -> Result<Self> {
        let d = x - spec.probe.apex;
        let r = d.r();
        let theta = if r > 0.0 { d.theta() } else { 0.0 };
        let unit = C64::from_polar(1.0, theta - spec.probe.axis.theta());
        let bessel = bessel_j_seq(mmax.min(BESSEL_M_MAX), spec.k * r)?;
        Ok(Self { spec, r, unit, bessel })
    }

    fn ln_coeff(&self, m: u32) -> f64 {
        let n = self.spec.probe.n.n() as f64;
        let half = 0.5 * self.spec.s() * self.r;
        let lp = if m == 0 { 0.0 } else { m as f64 * half.ln() };
        lp - ln_gamma(m as f64 / n + 1.0).expect("positive argument")
    }

    /// (sr/2)^m/Γ(m/n+1) Ĵ_m(kr) (ω̄e^{iθ})^m.
    fn term(&self, m: u32) -> C64 {
        if self.r == 0.0 {
            return if m == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        let (lj, sj) = self.bessel.ln_jhat(m);
        sj * (self.ln_coeff(m) + lj).exp() * self.unit.powu(m)
    }

    /// Gradient contribution of term m by the Bessel ladder identities.
    fn grad_term(&self, m: u32) -> [C64; 2] {
        let k = self.spec.k;
        let s = self.spec.s();
        let n = self.spec.probe.n.n() as f64;
        let wbar = C64::from_polar(1.0, -self.spec.probe.axis.theta());
        let half = 0.5 * s * self.r;
        let lg = ln_gamma(m as f64 / n + 1.0).expect("positive argument");
        let e = |p: i64| -> C64 {
            if self.r == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, p as f64 * (self.unit.arg() + self.spec.probe.axis.theta()))
            }
        };
        // c_m J_{m+1}(kr) and c_m J_{m−1}(kr), c_m the Bessel-series coefficient
        let a = if self.r == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let (lj, sj) = self.bessel.ln_jhat(m + 1);
            let lm = m as f64 * half.ln() + (0.5 * k * self.r).ln() - (m as f64 + 1.0).ln() - lg + lj;
            sj * lm.exp() * wbar.powu(m)
        };
        let b = if m == 0 {
            // J_{−1} = −J_1
            if self.r == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                let (lj, sj) = self.bessel.ln_jhat(1);
                C64::new(-sj * 0.5 * k * self.r * lj.exp(), 0.0)
            }
        } else if m == 1 || self.r > 0.0 {
            let (lj, sj) = if self.r == 0.0 { (0.0, 1.0) } else { self.bessel.ln_jhat(m - 1) };
            let lp = if m == 1 { 0.0 } else { (m as f64 - 1.0) * half.ln() };
            sj * ((m as f64).ln() + (s / k).ln() + lp - lg + lj).exp() * wbar.powu(m)
        } else {
            C64::new(0.0, 0.0)
        };
        let up = a * e(m as i64 + 1);
        let down = b * e(m as i64 - 1);
        let i = C64::new(0.0, 1.0);
        [(down - up) * (0.5 * k), i * (up + down) * (0.5 * k)]
    }
}

/// Hg_N(x) as the exact finite Bessel series.
pub fn herglotz_closed_form(spec: &DensitySpec, x: PlanePoint) -> Result<C64> {
    let ser = Series::new(spec, x, spec.degree() + 1)?;
    Ok((0..=spec.degree()).map(|m| ser.term(m)).sum())
}

/// ∇Hg_N(x) from the ladder identities for J_m(kr)e^{imθ}.
pub fn herglotz_gradient(spec: &DensitySpec, x: PlanePoint) -> Result<[C64; 2]> {
    let ser = Series::new(spec, x, spec.degree() + 2)?;
    let mut g = [C64::new(0.0, 0.0); 2];
    for m in 0..=spec.degree() {
        let t = ser.grad_term(m);
        g[0] += t[0];
        g[1] += t[1];
    }
    Ok(g)
}

/// Last order needed for the tail beyond nN to reach relative 1e-20 of its
/// largest term.
fn tail_end(spec: &DensitySpec, ser: &Series) -> Result<u32> {
    let n = spec.probe.n.n() as f64;
    let a = 0.5 * spec.s() * ser.r;
    let peak = a.powf(n);
    let mut best = f64::NEG_INFINITY;
    let mut m = spec.degree() + 1;
    loop {
        let l = ser.ln_coeff(m);
        best = best.max(l);
        if m as f64 / n > peak + 1.0 && l < best - 46.0 {
            return Ok(m);
        }
        if m >= BESSEL_M_MAX - 1 {
            return Err(Error::Range("tail requires orders beyond the Bessel envelope".into()));
        }
        m += 1;
    }
}

/// The tail Σ_{m>nN} of the Bessel series, so that Hg_N + tail = E_{1/n}(x−y;s,k,ω).
pub fn residual_tail(spec: &DensitySpec, x: PlanePoint) -> Result<C64> {
    if (x - spec.probe.apex).r() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let probe = Series::new(spec, x, spec.degree() + 1)?;
    let end = tail_end(spec, &probe)?;
    let ser = Series::new(spec, x, end + 1)?;
    Ok((spec.degree() + 1..=end).map(|m| ser.term(m)).sum())
}

/// Gradient of [`residual_tail`].
pub fn residual_tail_gradient(spec: &DensitySpec, x: PlanePoint) -> Result<[C64; 2]> {
    if (x - spec.probe.apex).r() == 0.0 {
        return Ok([C64::new(0.0, 0.0); 2]);
    }
    let probe = Series::new(spec, x, spec.degree() + 1)?;
    let end = tail_end(spec, &probe)?;
    let ser = Series::new(spec, x, end + 2)?;
    let mut g = [C64::new(0.0, 0.0); 2];
    for m in spec.degree() + 1..=end {
        let t = ser.grad_term(m);
        g[0] += t[0];
        g[1] += t[1];
    }
    Ok(g)
}

/// Sup-norm truncation errors of Hg_N against E_{1/n}(·;s(N),k,ω) for one N.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationRow {
    pub big_n: u32,
    pub s: f64,
    pub sup_error: f64,
    pub sup_grad_error: f64,
    /// N^{3/2} e^{N(γ/e + log γ)}.
    pub envelope: f64,
}

/// Sweep of [`TruncationRow`] with the envelope constant fitted at the smallest N.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub rows: Vec<TruncationRow>,
    pub constant: f64,
    /// Least-squares slope of log(sup error) against N.
    pub slope: f64,
    /// γ/e + log γ.
    pub predicted_slope: f64,
    pub within_envelope: bool,
}

/// Sample grid of `count`² points of the square [−ρ, ρ]² restricted to |x| ≤ ρ.
pub fn disc_grid(rho: f64, count: usize) -> Vec<PlanePoint> {
    let mut pts = Vec::new();
    for i in 0..count {
        for j in 0..count {
            let p = PlanePoint::new(-rho + 2.0 * rho * i as f64 / (count - 1) as f64, -rho + 2.0 * rho * j as f64 / (count - 1) as f64);
            if p.r() <= rho * (1.0 + 1e-12) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Truncation error of Hg_N over |x − y| ≤ 2R for each N.
///
/// The difference Hg_N − E_{1/n} equals minus the series tail exactly, so the
/// error is evaluated from the tail, which keeps full relative precision where a
/// difference of two O(e^{(Rs)^n}) values would not.
pub fn truncation_error_sweep(base: &DensitySpec, ns: &[u32], grid: &[PlanePoint]) -> Result<TruncationReport> {
    let g = base.schedule.gamma;
    let predicted_slope = g / E + g.ln();
    let mut rows = Vec::with_capacity(ns.len());
    for &big_n in ns {
        let spec = DensitySpec { big_n, ..*base };
        let mut sup_error = 0.0f64;
        let mut sup_grad_error = 0.0f64;
        for &p in grid {
            let x = base.probe.apex + p;
            sup_error = sup_error.max(residual_tail(&spec, x)?.norm());
            let gt = residual_tail_gradient(&spec, x)?;
            sup_grad_error = sup_grad_error.max(gt[0].norm() + gt[1].norm());
        }
        let nf = big_n as f64;
        rows.push(TruncationRow { big_n, s: spec.s(), sup_error, sup_grad_error, envelope: nf.powf(1.5) * (nf * predicted_slope).exp() });
    }
    let constant = rows.first().map(|r| (r.sup_error + r.sup_grad_error) / r.envelope).unwrap_or(0.0);
    let within_envelope = rows.iter().all(|r| r.sup_error + r.sup_grad_error <= constant * r.envelope * (1.0 + 1e-9));
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.big_n as f64, r.sup_error.ln())).collect();
    let slope = least_squares_slope(&pts);
    Ok(TruncationReport { rows, constant, slope, predicted_slope, within_envelope })
}

/// Slope of the least-squares line through `pts`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Values and gradients of a wave function on a boundary curve.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub params: Vec<f64>,
    pub points: Vec<PlanePoint>,
    pub values: Vec<C64>,
    pub gradients: Vec<[C64; 2]>,
    pub speeds: Vec<f64>,
    /// L²(∂D) norm of the values with the arc-length weight.
    pub l2_norm: f64,
}

/// Samples `f` (value and gradient) at `samples` equispaced parameters of `curve`.
pub fn boundary_trace<F>(f: F, curve: &ObstacleCurve, samples: usize) -> Result<BoundaryTrace>
where
    F: Fn(PlanePoint) -> Result<(C64, [C64; 2])>,
{
    if samples < 3 {
        return Err(Error::Precondition("need at least three boundary samples".into()));
    }
    let cs = curve.samples(samples);
    if cs.iter().any(|s| !(s.speed() > 0.0)) {
        return Err(Error::Geometry("curve has zero speed".into()));
    }
    let mut values = Vec::with_capacity(samples);
    let mut gradients = Vec::with_capacity(samples);
    for s in &cs {
        let (v, g) = f(s.point)?;
        values.push(v);
        gradients.push(g);
    }
    let speeds: Vec<f64> = cs.iter().map(|s| s.speed()).collect();
    let l2 = values.iter().zip(&speeds).map(|(v, sp)| v.norm_sqr() * sp).sum::<f64>() * TAU / samples as f64;
    Ok(BoundaryTrace {
        params: cs.iter().map(|s| s.t).collect(),
        points: cs.iter().map(|s| s.point).collect(),
        values,
        gradients,
        speeds,
        l2_norm: l2.sqrt(),
    })
}

/// Boundary trace of Hg_N for a density specification.
pub fn boundary_trace_spec(spec: &DensitySpec, curve: &ObstacleCurve, samples: usize) -> Result<BoundaryTrace> {
    boundary_trace(|x| Ok((herglotz_closed_form(spec, x)?, herglotz_gradient(spec, x)?)), curve, samples)
}

/// Periodic Fourier coefficients ĉ_m of uniformly sampled data, m in FFT order.
fn fourier_coeffs(trace: &[C64]) -> Result<Vec<C64>> {
    let m = trace.len();
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::Precondition(format!("sample count {m} must be a power of two")));
    }
    let mut buf = trace.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    Ok(buf.into_iter().map(|c| c / m as f64).collect())
}

fn weighted_norm(trace: &[C64], weight: impl Fn(f64) -> f64) -> Result<f64> {
    let c = fourier_coeffs(trace)?;
    let m = c.len();
    Ok(c.iter()
        .enumerate()
        .map(|(j, v)| {
            let freq = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
            weight(freq) * v.norm_sqr()
        })
        .sum())
}

/// Squared H^{1/2} surrogate Σ_m (1+m²)^{1/2} |ĉ_m|² of a parametrized periodic trace.
pub fn sobolev_half_norm(trace: &[C64]) -> Result<f64> {
    weighted_norm(trace, |m| (1.0 + m * m).sqrt())
}

/// Squared periodic L² norm Σ_m |ĉ_m|².
pub fn periodic_l2_norm(trace: &[C64]) -> Result<f64> {
    weighted_norm(trace, |_| 1.0)
}

/// Squared periodic H¹ norm Σ_m (1+m²) |ĉ_m|².
pub fn periodic_h1_norm(trace: &[C64]) -> Result<f64> {
    weighted_norm(trace, |m| 1.0 + m * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, MLOrder};
    use crate::vekua::ml_directional;

    fn spec(n: u32, big_n: u32, y: PlanePoint, w: f64, k: f64, radius: f64) -> DensitySpec {
        let o = MLOrder::new(n).unwrap();
        DensitySpec::new(ConeSpec::new(y, PlanePoint::unit(w), o).unwrap(), big_n, ScheduleParams::new(0.5, radius, o).unwrap(), k).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let sp = spec(1, 6, PlanePoint::ORIGIN, 0.3, 2.0, 1.0);
        let c = density_coeffs(&sp).unwrap();
        assert!((c.beta[0] - 1.0 / TAU).norm() < 1e-16);
        let q = C64::from_polar(sp.s() / 2.0, -0.3) / C64::new(0.0, 1.0);
        assert!((c.beta[5] - q.powu(5) / TAU).norm() < 1e-15 * c.beta[5].norm());
        let sp = spec(2, 4, PlanePoint::ORIGIN, 0.3, 2.0, 1.0);
        let c = density_coeffs(&sp).unwrap();
        let q = C64::from_polar(sp.s() / 2.0, -0.3) / C64::new(0.0, 1.0);
        let exact = 8.0 / PI.sqrt() * q.powu(3) / TAU;
        assert!((c.beta[3] - exact).norm() < 1e-14 * exact.norm());
    }

    #[test]
    fn density_integrates_to_one_and_moments() {
        let sp = spec(2, 5, PlanePoint::ORIGIN, 1.1, 2.0, 1.0);
        let c = density_coeffs(&sp).unwrap();
        let m = 64;
        let mut moments = [C64::new(0.0, 0.0); 12];
        let mut zero = [C64::new(0.0, 0.0); 12];
        for j in 0..m {
            let phi = PlanePoint::unit(TAU * j as f64 / m as f64);
            let g = density_eval(&c, PlanePoint::ORIGIN, 2.0, phi) * (TAU / m as f64);
            for q in 0..12 {
                moments[q] += phi.z().conj().powu(q as u32) * g;
                zero[q] += phi.z().powu(q as u32) * g;
            }
        }
        assert!((moments[0] - 1.0).norm() < 1e-14);
        for q in 0..=10 {
            assert!((moments[q] - TAU * c.beta[q]).norm() < 1e-12 * (1.0 + c.beta[q].norm()));
        }
        for q in 1..12 {
            assert!(zero[q].norm() < 1e-12);
        }
    }

    #[test]
    fn density_spot_value_against_direct_sum() {
        // direct summation at 50 digits (mpmath) for n = 2, N = 6, s from the schedule
        let sp = spec(2, 6, PlanePoint::new(0.2, -0.1), 0.4, 2.0, 1.0);
        let c = density_coeffs(&sp).unwrap();
        let g = density_eval(&c, PlanePoint::new(0.2, -0.1), 2.0, PlanePoint::unit(1.3));
        let mut direct = C64::new(0.0, 0.0);
        let q = C64::from_polar(sp.s() / 2.0, -0.4) / C64::new(0.0, 1.0) * C64::from_polar(1.0, 1.3);
        for m in 0..=12u32 {
            let ratio = libm::tgamma(m as f64 + 1.0) / libm::tgamma(m as f64 / 2.0 + 1.0);
            direct += ratio * q.powu(m);
        }
        direct *= C64::from_polar(1.0, -2.0 * PlanePoint::new(0.2, -0.1).dot(&PlanePoint::unit(1.3))) / TAU;
        assert!((g - direct).norm() < 1e-13 * direct.norm());
    }

    #[test]
    fn normalization_at_apex() {
        let y = PlanePoint::new(-0.3, 0.4);
        let sp = spec(3, 7, y, 2.0, 2.0, 1.0);
        assert!((herglotz_closed_form(&sp, y).unwrap() - 1.0).norm() < 1e-15);
        let c = density_coeffs(&sp).unwrap();
        let q = herglotz_quadrature(&c, y, 2.0, y, sp.quadrature_nodes()).unwrap();
        let l1: f64 = c.beta.iter().map(|b| TAU * b.norm()).sum();
        assert!((q.value - 1.0).norm() < 1e-14 * l1);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for (n, big_n) in [(1, 8), (2, 6), (3, 4)] {
            let y = PlanePoint::new(0.1, -0.2);
            let sp = spec(n, big_n, y, 0.7, 2.0, 1.0);
            let c = density_coeffs(&sp).unwrap();
            for i in 0..6 {
                let x = y + PlanePoint::unit(0.9 * i as f64) * (0.3 * i as f64);
                let a = herglotz_closed_form(&sp, x).unwrap();
                let q = herglotz_quadrature(&c, y, 2.0, x, sp.quadrature_nodes()).unwrap();
                assert!(!q.aliasing_suspected);
                assert!((a - q.value).norm() < 1e-11 * a.norm().max(1.0), "n={n} i={i}");
                assert!(q.doubling_change < 1e-12 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn undersampled_quadrature_is_flagged() {
        let sp = spec(2, 10, PlanePoint::ORIGIN, 0.0, 2.0, 1.0);
        let c = density_coeffs(&sp).unwrap();
        let q = herglotz_quadrature(&c, PlanePoint::ORIGIN, 2.0, PlanePoint::new(0.5, 0.5), 8).unwrap();
        assert!(q.aliasing_suspected);
    }

    #[test]
    fn closed_form_plus_tail_is_directional_ml() {
        for n in 1..=3 {
            let y = PlanePoint::new(0.2, 0.1);
            let sp = spec(n, 8, y, 0.5, 2.0, 1.0);
            for i in 0..5 {
                let x = y + PlanePoint::unit(1.3 * i as f64) * (0.4 * i as f64);
                let e = ml_directional(sp.probe.n, x - y, sp.s(), 2.0, sp.probe.axis).unwrap();
                let h = herglotz_closed_form(&sp, x).unwrap() + residual_tail(&sp, x).unwrap();
                assert!((e - h).norm() <= 1e-9 * e.norm(), "n={n} i={i}");
            }
            assert_eq!(residual_tail(&sp, y).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn tail_bounded_by_ml_truncation() {
        use crate::specfun::{mittag_leffler, mittag_leffler_partial};
        let sp = spec(1, 10, PlanePoint::ORIGIN, 0.0, 2.0, 1.0);
        for i in 1..6 {
            let x = PlanePoint::unit(0.4 * i as f64) * (0.35 * i as f64);
            let z = C64::new(0.5 * sp.s() * x.r(), 0.0);
            let bound = (mittag_leffler(sp.probe.n, z).unwrap() - mittag_leffler_partial(sp.probe.n, 10, z)).norm();
            assert!(residual_tail(&sp, x).unwrap().norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let y = PlanePoint::new(-0.2, 0.3);
        let sp = spec(2, 6, y, 2.5, 2.0, 1.0);
        let f = |p: PlanePoint| herglotz_closed_form(&sp, p).unwrap();
        for x in [PlanePoint::new(0.4, -0.1), PlanePoint::new(-0.9, 1.0), y + PlanePoint::new(1e-3, 0.0)] {
            let g = herglotz_gradient(&sp, x).unwrap();
            let h = 1e-5;
            let d1 = (f(x + PlanePoint::new(h, 0.0)) - f(x - PlanePoint::new(h, 0.0))) / (2.0 * h);
            let d2 = (f(x + PlanePoint::new(0.0, h)) - f(x - PlanePoint::new(0.0, h))) / (2.0 * h);
            assert!((g[0] - d1).norm() < 1e-8 * (1.0 + d1.norm()));
            assert!((g[1] - d2).norm() < 1e-8 * (1.0 + d2.norm()));
        }
    }

    #[test]
    fn gradient_at_apex() {
        let y = PlanePoint::new(0.3, 0.0);
        let sp = spec(3, 5, y, 0.9, 2.0, 1.0);
        let g = herglotz_gradient(&sp, y).unwrap();
        let c1 = C64::from_polar(sp.s() / 2.0, -0.9) / libm::tgamma(1.0 + 1.0 / 3.0);
        assert!((g[0] - c1).norm() < 1e-14);
        assert!((g[1] - c1 * C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn single_mode_gradient_is_classical() {
        let sp = spec(1, 1, PlanePoint::ORIGIN, 0.0, 3.0, 1.0);
        let x = PlanePoint::new(0.4, 0.3);
        let ser = Series::new(&sp, x, 3).unwrap();
        let g = ser.grad_term(0);
        let j1 = bessel_j(1, 3.0 * 0.5).unwrap();
        assert!((g[0].re + 3.0 * j1 * 0.8).abs() < 1e-14 && g[0].im.abs() < 1e-14);
        assert!((g[1].re + 3.0 * j1 * 0.6).abs() < 1e-14 && g[1].im.abs() < 1e-14);
    }

    #[test]
    fn ladder_raising_identity() {
        // e^{iθ}(∂_r + (i/r)∂_θ) J_m e^{imθ} = −k J_{m+1} e^{i(m+1)θ}, via ∂1 + i∂2
        let (k, m) = (2.0, 3u32);
        let x = PlanePoint::new(0.5, 0.7);
        let f = |p: PlanePoint| bessel_j(m, k * p.r()).unwrap() * C64::from_polar(1.0, m as f64 * p.theta());
        let h = 1e-5;
        let d1 = (f(x + PlanePoint::new(h, 0.0)) - f(x - PlanePoint::new(h, 0.0))) / (2.0 * h);
        let d2 = (f(x + PlanePoint::new(0.0, h)) - f(x - PlanePoint::new(0.0, h))) / (2.0 * h);
        let lhs = d1 + C64::new(0.0, 1.0) * d2;
        let rhs = -k * bessel_j(m + 1, k * x.r()).unwrap() * C64::from_polar(1.0, (m + 1) as f64 * x.theta());
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn trace_norms() {
        let disc = ObstacleCurve::disc(PlanePoint::ORIGIN, 0.7).unwrap();
        let t = boundary_trace(|_| Ok((C64::new(1.0, 0.0), [C64::default(); 2])), &disc, 64).unwrap();
        assert!((t.l2_norm - disc.length().sqrt()).abs() < 1e-13);
        let k = 2.0;
        let t = boundary_trace(|p| Ok((C64::new(bessel_j(0, k * p.r())?, 0.0), [C64::default(); 2])), &disc, 64).unwrap();
        let exact = bessel_j(0, k * 0.7).unwrap().abs() * (TAU * 0.7).sqrt();
        assert!((t.l2_norm - exact).abs() < 1e-13);
    }

    #[test]
    fn trace_norm_matches_refined_quadrature() {
        let kite = ObstacleCurve::kite(PlanePoint::new(0.1, 0.0), 0.4, 0.2).unwrap();
        let sp = spec(2, 5, PlanePoint::new(-1.2, 0.3), 0.3, 2.0, 2.0);
        let coarse = boundary_trace_spec(&sp, &kite, 256).unwrap().l2_norm;
        let fine = boundary_trace_spec(&sp, &kite, 1024).unwrap().l2_norm;
        assert!((coarse - fine).abs() < 1e-8 * fine);
    }

    #[test]
    fn sobolev_surrogate_examples() {
        let c = vec![C64::new(2.0, 1.0); 32];
        assert!((sobolev_half_norm(&c).unwrap() - 5.0).abs() < 1e-13);
        let m = 5.0;
        let mode: Vec<C64> = (0..64).map(|j| C64::from_polar(1.0, m * TAU * j as f64 / 64.0)).collect();
        assert!((sobolev_half_norm(&mode).unwrap() - (1.0f64 + m * m).sqrt()).abs() < 1e-12);
        assert!(sobolev_half_norm(&c[..30]).is_err());
    }

    #[test]
    fn sobolev_between_l2_and_h1() {
        let disc = ObstacleCurve::disc(PlanePoint::new(0.5, 0.0), 0.3).unwrap();
        let sp = spec(2, 8, PlanePoint::new(-1.0, 0.0), 0.0, 2.0, 2.0);
        let t = boundary_trace_spec(&sp, &disc, 128).unwrap();
        let (l2, h12, h1) =
            (periodic_l2_norm(&t.values).unwrap(), sobolev_half_norm(&t.values).unwrap(), periodic_h1_norm(&t.values).unwrap());
        assert!(l2 <= h12 && h12 <= h1);
    }

    #[test]
    fn truncation_sweep_decreases() {
        let sp = spec(1, 10, PlanePoint::ORIGIN, 0.0, 2.0, 1.0);
        let grid = disc_grid(2.0, 9);
        let ns: Vec<u32> = (5..=15).collect();
        let rep = truncation_error_sweep(&sp, &ns, &grid).unwrap();
        for w in rep.rows.windows(2) {
            assert!(w[1].sup_error < w[0].sup_error);
        }
        assert!(rep.predicted_slope < 0.0);
        let g0 = crate::specfun::gamma0_root();
        assert!((g0 / E + g0.ln()).abs() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        let o = MLOrder::new(2).unwrap();
        let probe = ConeSpec::new(PlanePoint::ORIGIN, PlanePoint::unit(0.0), o).unwrap();
        let sch = ScheduleParams::new(0.5, 1.0, o).unwrap();
        assert!(DensitySpec::new(probe, 2001, sch, 2.0).is_err());
        assert!(DensitySpec::new(probe, 0, sch, 2.0).is_err());
        assert!(DensitySpec::new(probe, 10, sch, 0.0).is_err());
    }
}
