//! Gamma function and its logarithm.

use crate::{Error, Result};
use std::sync::OnceLock;

const FACT_MAX: usize = 170;

fn factorials() -> &'static [f64; FACT_MAX + 1] {
    static TABLE: OnceLock<[f64; FACT_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACT_MAX + 1];
        for m in 1..=FACT_MAX {
            t[m] = t[m - 1] * m as f64;
        }
        t
    })
}

/// Γ(x) for x > 0; integer arguments come from an exact factorial table.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= (FACT_MAX + 1) as f64 {
        return Ok(factorials()[x as usize - 1]);
    }
    Ok(libm::tgamma(x))
}

/// log Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= (FACT_MAX + 1) as f64 {
        return Ok(factorials()[x as usize - 1].ln());
    }
    Ok(libm::lgamma_r(x).0)
}

/// log m!.
pub fn ln_factorial(m: u32) -> f64 {
    if (m as usize) <= FACT_MAX {
        factorials()[m as usize].ln()
    } else {
        libm::lgamma_r(m as f64 + 1.0).0
    }
}

/// 1/Γ(x) for any real x, zero at the poles, returned as (log |1/Γ|, sign).
pub fn rgamma(x: f64) -> (f64, f64) {
    if x <= 0.0 && x.fract() == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (lg, sign) = libm::lgamma_r(x);
    (-lg, sign as f64)
}
