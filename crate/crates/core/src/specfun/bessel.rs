//! Bessel functions of integer order and real argument.

use super::gamma::ln_factorial;
use crate::{Error, Result, C64};

/// Largest order accepted by the J and Ĵ evaluators.
pub const BESSEL_M_MAX: u32 = 4096;
/// Largest argument accepted by the J and Ĵ evaluators.
pub const BESSEL_T_MAX: f64 = 1000.0;
const H_M_MAX: u32 = 200;
const SERIES_T_MAX: f64 = 2.0;
const RESCALE: f64 = 1e250;

/// J_0(t), ..., J_M(t) stored as sign and log-magnitude, so that Ĵ_m stays
/// representable when J_m underflows.
#[derive(Debug, Clone)]
pub struct BesselSeq {
    t: f64,
    ln_abs: Vec<f64>,
    sign: Vec<f64>,
}

impl BesselSeq {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn max_order(&self) -> u32 {
        (self.ln_abs.len() - 1) as u32
    }

    pub fn j(&self, m: u32) -> f64 {
        self.sign[m as usize] * self.ln_abs[m as usize].exp()
    }

    /// (log |J_m|, sign J_m).
    pub fn ln_j(&self, m: u32) -> (f64, f64) {
        (self.ln_abs[m as usize], self.sign[m as usize])
    }

    /// (log |Ĵ_m|, sign Ĵ_m); Ĵ_m(0) = 1.
    pub fn ln_jhat(&self, m: u32) -> (f64, f64) {
        if self.t == 0.0 {
            return (0.0, 1.0);
        }
        let (l, s) = self.ln_j(m);
        (l + m as f64 * (2.0 / self.t).ln() + ln_factorial(m), s)
    }

    pub fn jhat(&self, m: u32) -> f64 {
        let (l, s) = self.ln_jhat(m);
        s * l.exp()
    }
}

fn check_envelope(mmax: u32, t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and nonnegative, got {t}")));
    }
    if mmax > BESSEL_M_MAX || t > BESSEL_T_MAX {
        return Err(Error::Range(format!("Bessel J outside envelope m <= {BESSEL_M_MAX}, t <= {BESSEL_T_MAX}: m = {mmax}, t = {t}")));
    }
    Ok(())
}

/// Σ_k (-t²/4)^k / (k! (m+1)_k), the entire factor of Ĵ_m(t).
fn jhat_series(m: u32, t: f64) -> f64 {
    let q = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for k in 1..200 {
        term *= q / (k as f64 * (m as f64 + k as f64));
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// J_0(t) through J_mmax(t).
///
/// Power series for t ≤ 2, otherwise Miller's backward recurrence normalized by
/// J_0 + 2 Σ J_{2i} = 1 with periodic rescaling.
pub fn bessel_j_seq(mmax: u32, t: f64) -> Result<BesselSeq> {
    check_envelope(mmax, t)?;
    let len = mmax as usize + 1;
    let mut ln_abs = vec![f64::NEG_INFINITY; len];
    let mut sign = vec![1.0; len];
    if t == 0.0 {
        ln_abs[0] = 0.0;
        return Ok(BesselSeq { t, ln_abs, sign });
    }
    if t <= SERIES_T_MAX {
        let lh = (0.5 * t).ln();
        for m in 0..=mmax {
            let s = jhat_series(m, t);
            ln_abs[m as usize] = m as f64 * lh - ln_factorial(m) + s.abs().ln();
            sign[m as usize] = s.signum();
        }
        return Ok(BesselSeq { t, ln_abs, sign });
    }
    let top = f64::max(mmax as f64, t);
    let mut start = (top + (40.0 * top).sqrt() + 20.0).ceil() as u32;
    start += start % 2;
    let mut mant = vec![0.0; len];
    let mut scale = vec![0.0; len];
    let (mut jp1, mut j) = (0.0_f64, 1e-30_f64);
    let mut norm = if start % 2 == 0 { 2.0 * j } else { 0.0 };
    for m in (1..=start).rev() {
        let jm1 = (2.0 * m as f64 / t) * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = m - 1;
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * j;
        } else if idx == 0 {
            norm += j;
        }
        if j.abs() > RESCALE {
            j /= RESCALE;
            jp1 /= RESCALE;
            norm /= RESCALE;
            for i in (idx as usize + 1)..len {
                scale[i] -= RESCALE.ln();
            }
        }
        if (idx as usize) < len {
            mant[idx as usize] = j;
            scale[idx as usize] = 0.0;
        }
    }
    let ln_norm = norm.abs().ln();
    for i in 0..len {
        ln_abs[i] = mant[i].abs().ln() + scale[i] - ln_norm;
        sign[i] = mant[i].signum() * norm.signum();
    }
    Ok(BesselSeq { t, ln_abs, sign })
}

/// J_m(t).
pub fn bessel_j(m: u32, t: f64) -> Result<f64> {
    Ok(bessel_j_seq(m, t)?.j(m))
}

/// J_m'(t).
pub fn bessel_j_deriv(m: u32, t: f64) -> Result<f64> {
    let seq = bessel_j_seq(m + 1, t)?;
    Ok(if m == 0 { -seq.j(1) } else { 0.5 * (seq.j(m - 1) - seq.j(m + 1)) })
}

/// Ĵ_m(t) = (2/t)^m m! J_m(t), with Ĵ_m(0) = 1.
pub fn jhat(m: u32, t: f64) -> Result<f64> {
    check_envelope(m, t)?;
    if t <= SERIES_T_MAX {
        return Ok(jhat_series(m, t));
    }
    Ok(bessel_j_seq(m, t)?.jhat(m))
}

/// Ĵ_0(t), ..., Ĵ_mmax(t).
pub fn jhat_seq(mmax: u32, t: f64) -> Result<Vec<f64>> {
    check_envelope(mmax, t)?;
    if t <= SERIES_T_MAX {
        return Ok((0..=mmax).map(|m| jhat_series(m, t)).collect());
    }
    let seq = bessel_j_seq(mmax, t)?;
    Ok((0..=mmax).map(|m| seq.jhat(m)).collect())
}

fn bessel_y_seq(mmax: u32, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::Singularity(format!("Bessel Y requires t > 0, got {t}")));
    }
    let mut y = Vec::with_capacity(mmax as usize + 2);
    y.push(libm::y0(t));
    y.push(libm::y1(t));
    for m in 1..mmax as usize {
        let next = (2.0 * m as f64 / t) * y[m] - y[m - 1];
        y.push(next);
    }
    y.truncate(mmax as usize + 1);
    Ok(y)
}

/// Y_m(t) by upward recurrence from Y_0 and Y_1.
pub fn bessel_y(m: u32, t: f64) -> Result<f64> {
    Ok(bessel_y_seq(m, t)?[m as usize])
}

/// H^{(1)}_0(t), ..., H^{(1)}_mmax(t).
pub fn bessel_h1_seq(mmax: u32, t: f64) -> Result<Vec<C64>> {
    if mmax > H_M_MAX {
        return Err(Error::Range(format!("Hankel order {mmax} exceeds {H_M_MAX}")));
    }
    let y = bessel_y_seq(mmax, t)?;
    let j = bessel_j_seq(mmax, t)?;
    let h: Vec<C64> = (0..=mmax).map(|m| C64::new(j.j(m), y[m as usize])).collect();
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range(format!("Hankel function overflow at t = {t}, m <= {mmax}")));
    }
    Ok(h)
}

/// H^{(1)}_m(t) = J_m(t) + i Y_m(t).
pub fn bessel_h1(m: u32, t: f64) -> Result<C64> {
    Ok(bessel_h1_seq(m, t)?[m as usize])
}

/// H^{(1)'}_m(t).
pub fn bessel_h1_deriv(m: u32, t: f64) -> Result<C64> {
    let h = bessel_h1_seq(m + 1, t)?;
    Ok(if m == 0 { -h[1] } else { 0.5 * (h[m as usize - 1] - h[m as usize + 1]) })
}

/// (H^{(1)}_0(t), H^{(1)}_1(t)) from the libm kernels, for hot loops.
pub fn hankel01(t: f64) -> (C64, C64) {
    (C64::new(libm::j0(t), libm::y0(t)), C64::new(libm::j1(t), libm::y1(t)))
}

/// The first `count` positive zeros of J_m', located by bracketing on a fine
/// grid and bisection.
pub fn jprime_zeros(m: u32, count: usize) -> Result<Vec<f64>> {
    let f = |t: f64| bessel_j_deriv(m, t);
    let mut zeros = Vec::with_capacity(count);
    let step = 0.05;
    let mut a = 0.1;
    let mut fa = f(a)?;
    while zeros.len() < count {
        let b = a + step;
        if b > BESSEL_T_MAX {
            return Err(Error::Range(format!("J'_{m} zeros beyond t = {BESSEL_T_MAX}")));
        }
        let fb = f(b)?;
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm * flo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}
