//! The Vekua transform, the modified Mittag-Leffler function
//! E^k_α(x;τ) = Σ_m (τ(x1+ix2))^m/Γ(αm+1) Ĵ_m(k|x|), its directional form and
//! gradients, and the large-τ reference formulas.
//!
//! Integrals over t ∈ [0,1] against Ĵ(k|x|√(1−t)) are computed after the
//! substitution t = 1 − w², which makes the integrands analytic in w.

use crate::geom::PlanePoint;
use crate::quad::{adaptive, Bundle, Tol};
use crate::specfun::{jhat, jhat_seq, ln_gamma, ml_pair, MLOrder, SERIES_W_MAX};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Largest (τ|x|)^n for which the hybrid evaluator uses the series.
const HYBRID_SERIES_W: f64 = 4.0;

/// Probing cone with apex y, unit axis ω and half-aperture π/(2n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub apex: PlanePoint,
    pub axis: PlanePoint,
    pub n: MLOrder,
}

impl ConeSpec {
    pub fn new(apex: PlanePoint, axis: PlanePoint, n: MLOrder) -> Result<Self> {
        if !apex.is_finite() {
            return Err(Error::Domain("cone apex must be finite".into()));
        }
        if (axis.r() - 1.0).abs() > 1e-14 {
            return Err(Error::Domain(format!("cone axis must be a unit vector, |ω| = {}", axis.r())));
        }
        Ok(Self { apex, axis, n })
    }

    /// cos of the half-aperture πα/2.
    pub fn cos_half_aperture(&self) -> f64 {
        if self.n.n() == 1 {
            0.0
        } else {
            (std::f64::consts::FRAC_PI_2 * self.n.alpha()).cos()
        }
    }
}

/// Wave number and scale parameter, with s = 2τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub k: f64,
    pub tau: f64,
}

impl EvalParams {
    pub fn new(k: f64, tau: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("need k > 0 and tau > 0, got k = {k}, tau = {tau}")));
        }
        Ok(Self { k, tau })
    }

    pub fn from_s(k: f64, s: f64) -> Result<Self> {
        Self::new(k, 0.5 * s)
    }

    pub fn s(&self) -> f64 {
        2.0 * self.tau
    }
}

/// Uniformity region of the large-τ asymptotics: R⁻¹ ≤ |x| ≤ R and an angular
/// margin ε, with defaults chosen here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityRegion {
    pub eps: f64,
    pub radius: f64,
}

impl Default for UniformityRegion {
    fn default() -> Self {
        Self { eps: 0.1, radius: 2.0 }
    }
}

impl UniformityRegion {
    fn radial_ok(&self, x: PlanePoint) -> bool {
        let r = x.r();
        r >= 1.0 / self.radius && r <= self.radius
    }

    /// x lies outside the cone of half-aperture πα/2 + ε about the x1-axis.
    pub fn outside(&self, n: MLOrder, x: PlanePoint) -> bool {
        self.radial_ok(x) && x.theta().abs() > std::f64::consts::FRAC_PI_2 * n.alpha() + self.eps
    }

    /// Re (x1+ix2)^n ≥ ε on the principal sector |arg x| < π/(2n).
    pub fn inside(&self, n: MLOrder, x: PlanePoint) -> bool {
        self.radial_ok(x) && in_sector(n, x) && x.z().powi(n.n() as i32).re >= self.eps
    }
}

fn in_sector(n: MLOrder, x: PlanePoint) -> bool {
    x.r() > 0.0 && x.theta().abs() < std::f64::consts::FRAC_PI_2 * n.alpha()
}

fn tol() -> Tol {
    Tol { rel: 1e-13, local: 1e-12, ..Tol::default() }
}

/// (Ĵ_1(t), Ĵ_2(t)) for the quadrature kernels.
fn hat12(t: f64) -> (f64, f64) {
    if t <= 2.0 {
        (jhat(1, t).unwrap_or(1.0), jhat(2, t).unwrap_or(1.0))
    } else {
        (2.0 * libm::j1(t) / t, 8.0 * libm::jn(2, t) / (t * t))
    }
}

/// Vekua transform u(x) = v(x) − (k|x|/2) ∫₀¹ v(tx) J_1(k|x|√(1−t)) dt/√(1−t),
/// evaluated as v(x) − k|x| ∫₀¹ v((1−w²)x) J_1(k|x|w) dw.
///
/// `v` may be called concurrently by callers that parallelize over points.
pub fn vekua_transform<F: Fn(PlanePoint) -> C64>(v: F, x: PlanePoint, k: f64) -> Result<C64> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("wave number must be nonnegative, got {k}")));
    }
    let vx = v(x);
    if !vx.is_finite() {
        return Err(Error::NonFinite(format!("v({}, {})", x.x1, x.x2)));
    }
    let c = k * x.r();
    if c == 0.0 {
        return Ok(vx);
    }
    let integral: C64 = adaptive(|w| v(x * (1.0 - w * w)) * libm::j1(c * w), 0.0, 1.0, tol())?;
    Ok(vx - c * integral)
}

/// E^k_{1/n}(x;τ) by its defining series; requires (τ|x|)^n ≤ 30.
pub fn ml_modified_series(n: MLOrder, x: PlanePoint, tau: f64, k: f64) -> Result<C64> {
    let r = x.r();
    let a = tau * r;
    let w = a.powi(n.n() as i32);
    if w > SERIES_W_MAX {
        return Err(Error::Range(format!("series envelope (tau|x|)^n <= {SERIES_W_MAX} exceeded: {w}")));
    }
    if r == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let nf = n.n() as f64;
    let mmax = (nf * (2.0 * w + 60.0)) as u32;
    let jh = jhat_seq(mmax, k * r)?;
    let theta = x.theta();
    let la = a.ln();
    let mut sum = C64::new(0.0, 0.0);
    for m in 0..=mmax {
        let mag = (m as f64 * la - ln_gamma(m as f64 / nf + 1.0)?).exp();
        let t = C64::from_polar(mag * jh[m as usize], m as f64 * theta);
        sum += t;
        if m as f64 > nf * (w + 1.0) && mag < 1e-18 * sum.norm() {
            break;
        }
    }
    Ok(sum)
}

/// E^k_{1/n}(x;τ) = E(τz) − (k|x|/2)² ∫₀¹ E(τtz) Ĵ_1(k|x|√(1−t)) dt.
pub fn ml_modified_integral(n: MLOrder, x: PlanePoint, tau: f64, k: f64) -> Result<C64> {
    let z = x.z() * tau;
    let (e, _) = ml_pair(n, z)?;
    let c = k * x.r();
    if c == 0.0 {
        return Ok(e);
    }
    let integral: C64 = adaptive(
        |w| {
            let (f, _) = ml_pair(n, z * (1.0 - w * w)).unwrap_or((C64::new(f64::NAN, 0.0), C64::default()));
            f * (hat12(c * w).0 * 2.0 * w)
        },
        0.0,
        1.0,
        tol(),
    )?;
    Ok(e - 0.25 * c * c * integral)
}

/// E^k_{1/n}(x;τ): series when (τ|x|)^n ≤ 4, integral representation otherwise.
pub fn ml_modified(n: MLOrder, x: PlanePoint, tau: f64, k: f64) -> Result<C64> {
    if (tau * x.r()).powi(n.n() as i32) <= HYBRID_SERIES_W {
        ml_modified_series(n, x, tau, k)
    } else {
        ml_modified_integral(n, x, tau, k)
    }
}

/// Coordinates (x·ω, x·ω⊥).
pub fn rotate_into(x: PlanePoint, omega: PlanePoint) -> PlanePoint {
    PlanePoint::new(x.dot(&omega), x.dot(&omega.perp()))
}

/// E_{1/n}(x;s,k,ω) = E^k_{1/n}((x·ω, x·ω⊥); s/2).
pub fn ml_directional(n: MLOrder, x: PlanePoint, s: f64, k: f64, omega: PlanePoint) -> Result<C64> {
    ml_modified(n, rotate_into(x, omega), 0.5 * s, k)
}

/// Gradient of E^k_{1/n}(·;τ) at x from the differentiated integral representation.
pub fn ml_modified_gradient(n: MLOrder, x: PlanePoint, tau: f64, k: f64) -> Result<[C64; 2]> {
    let z = x.z() * tau;
    let (_, d) = ml_pair(n, z)?;
    let c = k * x.r();
    let i = C64::new(0.0, 1.0);
    let lead = [d * tau, d * tau * i];
    if c == 0.0 {
        return Ok(lead);
    }
    let ints: Bundle<3> = adaptive(
        |w| {
            let t = 1.0 - w * w;
            let (f, fd) = ml_pair(n, z * t).unwrap_or((C64::new(f64::NAN, 0.0), C64::default()));
            let (h1, h2) = hat12(c * w);
            let jac = 2.0 * w;
            Bundle([f * (h1 * jac), fd * (t * h1 * jac), f * (w * w * h2 * jac)])
        },
        0.0,
        1.0,
        tol(),
    )?;
    let [i1, i2, i3] = ints.0;
    let kk = 0.25 * k * k;
    let cc = 0.25 * c * c;
    let xs = [x.x1, x.x2];
    let ij = [C64::new(1.0, 0.0), i];
    Ok(std::array::from_fn(|j| lead[j] - ij[j] * tau * cc * i2 - 2.0 * kk * xs[j] * i1 + kk * cc * xs[j] * i3))
}

/// Gradient of E_{1/n}(·;s,k,ω) at x.
pub fn ml_directional_gradient(n: MLOrder, x: PlanePoint, s: f64, k: f64, omega: PlanePoint) -> Result<[C64; 2]> {
    let [g1, g2] = ml_modified_gradient(n, rotate_into(x, omega), 0.5 * s, k)?;
    Ok([g1 * omega.x1 - g2 * omega.x2, g1 * omega.x2 + g2 * omega.x1])
}

fn strictly_outside(n: MLOrder, x: PlanePoint) -> bool {
    x.r() > 0.0 && x.theta().abs() > std::f64::consts::FRAC_PI_2 * n.alpha()
}

/// Leading term (k|x|/2)² Ĵ_1(k|x|)/(x1+ix2) · (log τ)/(τ Γ(1−α)) of E^k_α(x;τ)
/// outside the closed cone; identically zero for α = 1.
pub fn asymptotic_outside(n: MLOrder, x: PlanePoint, tau: f64, k: f64) -> Result<C64> {
    if !strictly_outside(n, x) {
        return Err(Error::Domain(format!("({}, {}) is not outside the closed cone", x.x1, x.x2)));
    }
    if n.n() == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let c = k * x.r();
    let g = libm::tgamma(1.0 - n.alpha());
    Ok(0.25 * c * c * jhat(1, c)? / x.z() * (tau.ln() / (tau * g)))
}

/// Leading term (1/α) exp(τ^{1/α}(x1+ix2)^{1/α}) of E^k_α(x;τ) inside the sector,
/// with the principal branch of the 1/α power.
pub fn asymptotic_inside(n: MLOrder, x: PlanePoint, tau: f64, _k: f64) -> Result<C64> {
    let w = (x.z() * tau).powi(n.n() as i32);
    if !in_sector(n, x) {
        return Err(Error::Domain(format!("({}, {}) is outside the growth sector", x.x1, x.x2)));
    }
    let v = n.n() as f64 * w.exp();
    if !v.is_finite() {
        return Err(Error::Range(format!("exp overflow at Re (tau z)^n = {}", w.re)));
    }
    Ok(v)
}

/// Strict interior membership (x−y)·ω > |x−y| cos(πα/2).
pub fn in_cone(c: &ConeSpec, x: PlanePoint) -> Result<bool> {
    let d = x - c.apex;
    if d.r() == 0.0 {
        return Err(Error::Domain("point coincides with the cone apex".into()));
    }
    Ok(d.dot(&c.axis) > d.r() * c.cos_half_aperture())
}

/// Closed-cone membership (x−y)·ω ≥ |x−y| cos(πα/2).
pub fn in_closed_cone(c: &ConeSpec, x: PlanePoint) -> Result<bool> {
    let d = x - c.apex;
    if d.r() == 0.0 {
        return Err(Error::Domain("point coincides with the cone apex".into()));
    }
    Ok(d.dot(&c.axis) >= d.r() * c.cos_half_aperture())
}

/// Remainders of the principal-part expansions of a Vekua-transformed entire
/// function and the right-hand sides of their bounds.
#[derive(Debug, Clone, Serialize)]
pub struct RemainderReport {
    pub r: C64,
    pub bound_r: f64,
    pub r_grad: [C64; 2],
    pub bound_r_grad: [f64; 2],
    /// Absolute slack granted for quadrature error amplified by (2/k|x|)².
    pub slack: f64,
    pub pass_r: bool,
    pub pass_r_grad: [bool; 2],
}

impl RemainderReport {
    pub fn pass(&self) -> bool {
        self.pass_r && self.pass_r_grad.iter().all(|&p| p)
    }
}

/// Evaluates R(x;τ), R_j(x;τ) and their bounds for u = Vekua transform of
/// f(τ(x1+ix2)); `f` returns (f(z), f'(z)).
pub fn remainder_bound_check<F>(f: F, x: PlanePoint, tau: f64, k: f64) -> Result<RemainderReport>
where
    F: Fn(C64) -> Result<(C64, C64)>,
{
    let c = k * x.r();
    if !(c > 0.0) || !(tau > 0.0) {
        return Err(Error::Domain("need k|x| > 0 and tau > 0".into()));
    }
    let z = x.z();
    let (f0, fd0) = f(tau * z)?;
    let nan = (C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0));
    // Integrals in w with t = 1 − w²: u-kernel, gradient kernels, then the
    // plain t-integrals of f for the principal parts and the bounds.
    let vk: Bundle<3> = adaptive(
        |w| {
            let t = 1.0 - w * w;
            let (fv, fdv) = f(tau * t * z).unwrap_or(nan);
            let (h1, h2) = hat12(c * w);
            let jac = 2.0 * w;
            Bundle([fv * (h1 * jac), fdv * (t * h1 * jac), fv * (w * w * h2 * jac)])
        },
        0.0,
        1.0,
        tol(),
    )?;
    let plain: Bundle<4> = adaptive(
        |t| {
            let (fv, fdv) = f(tau * t * z).unwrap_or(nan);
            Bundle([fv, C64::new(t * fv.norm(), 0.0), C64::new(tau * t * t * fdv.norm(), 0.0), C64::new(fv.norm(), 0.0)])
        },
        0.0,
        1.0,
        tol(),
    )?;
    let [i1, i2, i3] = vk.0;
    let [avg, tf, t2fd, l1] = plain.0;
    let cc = 0.25 * c * c;
    let kk = 0.25 * k * k;
    let inv = 1.0 / cc;
    let i = C64::new(0.0, 1.0);
    let ij = [C64::new(1.0, 0.0), i];
    let mij = [C64::new(1.0, 0.0), -i];
    let xs = [x.x1, x.x2];
    let h1 = jhat(1, c)?;
    let h2 = jhat(2, c)?;

    let u = f0 - cc * i1;
    let r = inv * (u - f0) + h1 * avg;
    let bound_r = 0.5 * cc * tf.re;

    let mut r_grad = [C64::default(); 2];
    let mut bound_r_grad = [0.0; 2];
    for j in 0..2 {
        let du = ij[j] * tau * fd0 - ij[j] * tau * cc * i2 - 2.0 * kk * xs[j] * i1 + kk * cc * xs[j] * i3;
        let principal = -ij[j] * h1 * f0 / z + (-mij[j] * h1 / z.conj() + kk * xs[j] * h2) * avg;
        r_grad[j] = inv * (du - ij[j] * tau * fd0) - principal;
        let geo = 2.0 * xs[j].abs() / (x.r() * x.r()) * (2.0 + cc / 3.0);
        bound_r_grad[j] = 0.5 * cc * (t2fd.re + geo * tf.re);
    }
    let slack = 1e-10 * inv * (f0.norm() + fd0.norm() * tau * x.r() + cc * l1.re * (1.0 + tau));
    let pass_r = r.norm() <= bound_r + slack;
    let pass_r_grad = [r_grad[0].norm() <= bound_r_grad[0] + slack, r_grad[1].norm() <= bound_r_grad[1] + slack];
    Ok(RemainderReport { r, bound_r, r_grad, bound_r_grad, slack, pass_r, pass_r_grad })
}
