//! Scalar special functions: Gamma, Bessel J/Y/H, the normalized Bessel
//! function Ĵ_m, Mittag-Leffler functions of order 1/n, and the schedule s(N).

mod bessel;
mod gamma;
mod mittag_leffler;

pub use bessel::{
    bessel_h1, bessel_h1_deriv, bessel_h1_seq, bessel_j, bessel_j_deriv, bessel_j_seq, bessel_y, hankel01, jhat, jhat_seq, jprime_zeros,
    BesselSeq, BESSEL_M_MAX, BESSEL_T_MAX,
};
pub use gamma::{gamma_fn, ln_factorial, ln_gamma, rgamma};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_deriv, mittag_leffler_partial, mittag_leffler_partial_deriv, mittag_leffler_series, ml_pair,
    ml_series_pair, truncation_bound, truncation_deriv_bound, SERIES_W_MAX,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Order n of the Mittag-Leffler function E_{1/n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MLOrder(u32);

impl MLOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("order n must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn n(&self) -> u32 {
        self.0
    }

    /// α = 1/n.
    pub fn alpha(&self) -> f64 {
        1.0 / self.0 as f64
    }
}

/// Parameters of the schedule (R s(N))^n = (γ/e) N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub gamma: f64,
    pub radius: f64,
    pub n: MLOrder,
}

impl ScheduleParams {
    pub fn new(gamma: f64, radius: f64, n: MLOrder) -> Result<Self> {
        let g0 = gamma0_root();
        if !(gamma > 0.0 && gamma < g0) {
            return Err(Error::Domain(format!("gamma = {gamma} must lie in (0, {g0})")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius = {radius} must be positive")));
        }
        Ok(Self { gamma, radius, n })
    }
}

/// The positive root γ₀ of log t + t/e = 0, found by bisection on [0.1, 1].
pub fn gamma0_root() -> f64 {
    let f = |t: f64| t.ln() + t / std::f64::consts::E;
    let (mut lo, mut hi) = (0.1_f64, 1.0_f64);
    while hi - lo > 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// s(N) = ((γ/e) N)^{1/n} / R, with the O(1) freedom fixed to zero.
pub fn s_schedule(p: &ScheduleParams, big_n: u32) -> f64 {
    ((p.gamma / std::f64::consts::E) * big_n as f64).powf(p.n.alpha()) / p.radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn gamma0_residual_and_bracket() {
        let g = gamma0_root();
        assert!((g.ln() + g / E).abs() <= 1e-14);
        assert!(g > 0.75 && g < 0.77);
        assert!(0.5f64.ln() + 0.5 / E < 0.0);
        assert!(0.9f64.ln() + 0.9 / E > 0.0);
    }

    #[test]
    fn schedule_examples() {
        let p = ScheduleParams::new(E * 0.25, 1.0, MLOrder::new(1).unwrap()).unwrap();
        assert!((s_schedule(&p, 4) - 1.0).abs() < 1e-15);
        let p = ScheduleParams::new(0.5, 2.0, MLOrder::new(2).unwrap()).unwrap();
        // mpmath: sqrt(0.5/e*16)/2 at 30 digits
        assert!((s_schedule(&p, 16) - 0.857_763_884_960_706_8).abs() < 1e-15);
    }

    #[test]
    fn schedule_rejects_gamma_above_root() {
        assert!(ScheduleParams::new(0.8, 1.0, MLOrder::new(1).unwrap()).is_err());
        assert!(MLOrder::new(0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn schedule_defining_identity(g in 0.01f64..0.75, r in 0.1f64..10.0, n in 1u32..5, big_n in 1u32..200) {
            let p = ScheduleParams::new(g, r, MLOrder::new(n).unwrap()).unwrap();
            let s = s_schedule(&p, big_n);
            let lhs = (r * s).powi(n as i32);
            let rhs = g / E * big_n as f64;
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
