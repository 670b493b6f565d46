//! Mittag-Leffler functions E_{1/n}(z) = Σ z^m / Γ(m/n + 1).
//!
//! With w = z^n the function splits as
//! E = S e^w − Σ_{r=1}^{n−1} ζ^r e^w Γ(r/n, w)/Γ(r/n),
//! where ζ = e^{2πij/n} is the root of unity nearest z/|z| (j chosen so that
//! z' = z/ζ has |arg z'| ≤ π/n), S = n when ζ = 1 and 0 otherwise, and w^{r/n}
//! means z'^r. The evaluator switches between the power series (small |w|),
//! this decomposition (moderate |w|) and the algebraic asymptotic expansion
//! (large |w|) so that no regime sums a cancelling series.

use super::gamma::{gamma_fn, ln_gamma, rgamma};
use super::MLOrder;
use crate::{Error, Result, C64};

/// Largest |z|^n accepted by the plain series evaluator.
pub const SERIES_W_MAX: f64 = 30.0;
const HYBRID_SERIES_W: f64 = 4.0;
const ASYMPTOTIC_W: f64 = 36.0;
const GAMMA_SERIES_LOSS: f64 = 8.0;
const EXP_MAX: f64 = 709.0;

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: C64,
    comp: C64,
}

impl Compensated {
    fn add(&mut self, v: C64) {
        self.sum.re = Self::step(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = Self::step(self.sum.im, v.im, &mut self.comp.im);
    }

    fn step(sum: f64, v: f64, comp: &mut f64) -> f64 {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            *comp += (sum - t) + v;
        } else {
            *comp += (v - t) + sum;
        }
        t
    }

    fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn check_finite(z: C64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {z}")))
    }
}

/// Iterates (m, z^m/Γ(m/n+1), z^{m−1}/Γ(m/n+1)) using Γ(a+1) = aΓ(a) in steps of n.
struct SeriesTerms {
    n: usize,
    w: C64,
    m: usize,
    t: Vec<C64>,
    u: Vec<C64>,
}

impl SeriesTerms {
    fn new(n: u32, z: C64) -> Self {
        let n = n as usize;
        let g = |m: usize| gamma_fn(m as f64 / n as f64 + 1.0).expect("positive argument");
        let t = (0..n).map(|r| z.powi(r as i32) / g(r)).collect();
        let u = (1..=n).map(|r| z.powi(r as i32 - 1) / g(r)).collect();
        Self { n, w: z.powi(n as i32), m: 0, t, u }
    }
}

impl Iterator for SeriesTerms {
    type Item = (usize, C64, C64);
    fn next(&mut self) -> Option<Self::Item> {
        let m = self.m;
        let n = self.n;
        let ts = m % n;
        let t = self.t[ts];
        self.t[ts] *= self.w / (m as f64 / n as f64 + 1.0);
        let u = if m == 0 {
            C64::new(0.0, 0.0)
        } else {
            let us = (m - 1) % n;
            let u = self.u[us];
            self.u[us] *= self.w / (m as f64 / n as f64 + 1.0);
            u
        };
        self.m += 1;
        Some((m, t, u))
    }
}

/// (E_{1/n}(z), E'_{1/n}(z)) by the compensated power series, for |z|^n ≤ 30.
pub fn ml_series_pair(n: MLOrder, z: C64) -> Result<(C64, C64)> {
    check_finite(z)?;
    let aw = z.norm().powi(n.n() as i32);
    if aw > SERIES_W_MAX {
        return Err(Error::Range(format!("series evaluation of E_1/{} needs |z|^n <= {SERIES_W_MAX}, got {aw}", n.n())));
    }
    let nn = n.n() as usize;
    let mut e = Compensated::default();
    let mut d = Compensated::default();
    let mut small_run = 0;
    for (m, t, u) in SeriesTerms::new(n.n(), z) {
        e.add(t);
        d.add(u * m as f64);
        let tiny = t.norm() <= 1e-17 * e.value().norm() && (u * m as f64).norm() <= 1e-17 * d.value().norm();
        if m as f64 > (aw + 1.0) * nn as f64 && tiny {
            small_run += 1;
            if small_run >= nn {
                break;
            }
        } else {
            small_run = 0;
        }
        if m > 20_000 {
            return Err(Error::Range("series failed to converge".into()));
        }
    }
    Ok((e.value(), d.value()))
}

/// E_{1/n}(z) by the compensated power series, for |z|^n ≤ 30.
pub fn mittag_leffler_series(n: MLOrder, z: C64) -> Result<C64> {
    Ok(ml_series_pair(n, z)?.0)
}

/// e^w Γ(a, w)/Γ(a) for principal w = z'^n with w^a given by z'^r.
fn upper_gamma_scaled(a: f64, w: C64, wa: C64) -> C64 {
    let aw = w.norm();
    let loss = aw * (1.0 + w.arg().cos());
    let ga = gamma_fn(a).expect("positive argument");
    if loss <= GAMMA_SERIES_LOSS {
        let mut acc = Compensated::default();
        let mut p = C64::new(1.0, 0.0);
        for q in 0..10_000 {
            let t = p / (a + q as f64);
            acc.add(t);
            if q as f64 > aw && t.norm() <= 1e-17 * acc.value().norm() {
                break;
            }
            p *= -w / (q as f64 + 1.0);
        }
        let ew = w.exp();
        ew - ew * wa * acc.value() / ga
    } else {
        let tiny = 1e-300;
        let mut f = w + 1.0 - a;
        if f.norm() == 0.0 {
            f = C64::new(tiny, 0.0);
        }
        let mut c = f;
        let mut d = C64::new(0.0, 0.0);
        for i in 1..5000 {
            let ai = -(i as f64) * (i as f64 - a);
            let bi = w + (2 * i + 1) as f64 - a;
            d = bi + ai * d;
            if d.norm() == 0.0 {
                d = C64::new(tiny, 0.0);
            }
            c = bi + ai / c;
            if c.norm() == 0.0 {
                c = C64::new(tiny, 0.0);
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                break;
            }
        }
        wa / f / ga
    }
}

fn asymptotic_pair(n: u32, z: C64, s: f64, w: C64) -> Result<(C64, C64)> {
    let nn = n as usize;
    let aw = w.norm();
    let zinv = 1.0 / z;
    let mut e = Compensated::default();
    let mut d = Compensated::default();
    let jmax = (aw * n as f64).floor() as usize;
    let mut zp = C64::new(1.0, 0.0);
    for j in 1..=jmax.max(1) {
        zp *= zinv;
        if j % nn == 0 {
            continue;
        }
        let (lr, sg) = rgamma(1.0 - j as f64 / n as f64);
        let t = zp * (sg * lr.exp());
        let mag = t.norm();
        e.add(-t);
        d.add(t * zinv * j as f64);
        if mag <= 1e-17 * e.value().norm() {
            break;
        }
    }
    let mut ev = e.value();
    let mut dv = d.value();
    if s != 0.0 {
        if w.re > EXP_MAX {
            return Err(Error::Range(format!("E_1/{n}(z) overflows: Re z^n = {}", w.re)));
        }
        let ew = w.exp();
        ev += s * ew;
        dv += s * n as f64 * z.powi(n as i32 - 1) * ew;
    }
    Ok((ev, dv))
}

fn decomposition_pair(n: u32, z: C64, w: C64, zeta: C64, zp: C64, s: f64) -> Result<(C64, C64)> {
    if s != 0.0 && w.re > EXP_MAX {
        return Err(Error::Range(format!("E_1/{n}(z) overflows: Re z^n = {}", w.re)));
    }
    let ew = if s != 0.0 { w.exp() } else { C64::new(0.0, 0.0) };
    let zn1 = z.powi(n as i32 - 1);
    let mut e = Compensated::default();
    let mut d = Compensated::default();
    e.add(s * ew);
    d.add(s * n as f64 * zn1 * ew);
    for r in 1..n {
        let a = r as f64 / n as f64;
        let q = upper_gamma_scaled(a, w, zp.powi(r as i32));
        let zr = zeta.powi(r as i32);
        e.add(-zr * q);
        let ga = gamma_fn(a).expect("positive argument");
        d.add(n as f64 * (z.powi(r as i32 - 1) / ga - zn1 * zr * q));
    }
    Ok((e.value(), d.value()))
}

/// (E_{1/n}(z), E'_{1/n}(z)) with the regime chosen from |z|^n.
pub fn ml_pair(n: MLOrder, z: C64) -> Result<(C64, C64)> {
    check_finite(z)?;
    let nn = n.n();
    if nn == 1 {
        if z.re > EXP_MAX {
            return Err(Error::Range(format!("exp overflows at Re z = {}", z.re)));
        }
        let e = z.exp();
        return Ok((e, e));
    }
    let w = z.powi(nn as i32);
    let aw = w.norm();
    let out = if aw <= HYBRID_SERIES_W {
        ml_series_pair(n, z)?
    } else {
        let j = (nn as f64 * z.arg() / (2.0 * std::f64::consts::PI)).round() as i64;
        let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / nn as f64);
        let s = if j == 0 { nn as f64 } else { 0.0 };
        if aw >= ASYMPTOTIC_W {
            asymptotic_pair(nn, z, s, w)?
        } else {
            decomposition_pair(nn, z, w, zeta, z * zeta.conj(), s)?
        }
    };
    if !(out.0.is_finite() && out.1.is_finite()) {
        return Err(Error::Range(format!("E_1/{nn}({z}) is not representable")));
    }
    Ok(out)
}

/// E_{1/n}(z).
pub fn mittag_leffler(n: MLOrder, z: C64) -> Result<C64> {
    Ok(ml_pair(n, z)?.0)
}

/// E'_{1/n}(z).
pub fn mittag_leffler_deriv(n: MLOrder, z: C64) -> Result<C64> {
    Ok(ml_pair(n, z)?.1)
}

/// The truncated sum Σ_{m=0}^{nN} z^m/Γ(m/n+1), compensated.
pub fn mittag_leffler_partial(n: MLOrder, big_n: u32, z: C64) -> C64 {
    let last = (n.n() * big_n) as usize;
    let mut acc = Compensated::default();
    for (_, t, _) in SeriesTerms::new(n.n(), z).take(last + 1) {
        acc.add(t);
    }
    acc.value()
}

/// Derivative of the truncated sum, Σ_{m=1}^{nN} m z^{m−1}/Γ(m/n+1).
pub fn mittag_leffler_partial_deriv(n: MLOrder, big_n: u32, z: C64) -> C64 {
    let last = (n.n() * big_n) as usize;
    let mut acc = Compensated::default();
    for (m, _, u) in SeriesTerms::new(n.n(), z).take(last + 1) {
        acc.add(u * m as f64);
    }
    acc.value()
}

/// Σ_{l=1}^n |z|^{nN+l}/Γ(N+1+l/n) · e^{|Re z^n|}, the truncation-error bound.
pub fn truncation_bound(n: MLOrder, big_n: u32, z: C64) -> f64 {
    let nn = n.n() as i32;
    let lz = z.norm().ln();
    let ex = z.powi(nn).re.abs();
    (1..=nn)
        .map(|l| {
            let lg = ln_gamma(big_n as f64 + 1.0 + l as f64 / nn as f64).expect("positive argument");
            ((nn * big_n as i32 + l) as f64 * lz - lg + ex).exp()
        })
        .sum()
}

/// n|z|^{n−1} Σ_{l=1}^n |z|^{n(N−1)+l}/Γ(N+l/n) · e^{|Re z^n|}, the bound for the
/// derivative of the truncation error.
pub fn truncation_deriv_bound(n: MLOrder, big_n: u32, z: C64) -> f64 {
    let nn = n.n() as i32;
    let lz = z.norm().ln();
    let ex = z.powi(nn).re.abs();
    let sum: f64 = (1..=nn)
        .map(|l| {
            let lg = ln_gamma(big_n as f64 + l as f64 / nn as f64).expect("positive argument");
            ((nn * (big_n as i32 - 1) + l) as f64 * lz - lg + ex).exp()
        })
        .sum();
    nn as f64 * z.norm().powi(nn - 1) * sum
}
