//! Far field of a sound-hard disc by separation of variables.

use crate::geom::PlanePoint;
use crate::specfun::{bessel_h1_seq, bessel_j_seq};
use crate::{Error, Result, C64};
use std::f64::consts::{FRAC_PI_4, PI};

/// Largest admissible ka.
pub const DISC_KA_MAX: f64 = 30.0;

/// Mode ratios a_m = J_m'(ka)/H_m^{(1)'}(ka), m ≥ 0, truncated below 1e-14.
#[derive(Debug, Clone)]
pub struct DiscSeries {
    pub k: f64,
    pub radius: f64,
    pub center: PlanePoint,
    pub ratios: Vec<C64>,
}

impl DiscSeries {
    pub fn new(radius: f64, center: PlanePoint, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("wave number must be positive, got {k}")));
        }
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!("disc radius must be positive, got {radius}")));
        }
        let t = k * radius;
        if t > DISC_KA_MAX {
            return Err(Error::Range(format!("ka = {t} exceeds {DISC_KA_MAX}")));
        }
        let mmax = (t + 40.0).ceil() as u32;
        let j = bessel_j_seq(mmax + 1, t)?;
        let h = bessel_h1_seq(mmax + 1, t)?;
        let mut ratios = Vec::new();
        for m in 0..=mmax as usize {
            let (jd, hd) =
                if m == 0 { (-j.j(1), -h[1]) } else { (0.5 * (j.j(m as u32 - 1) - j.j(m as u32 + 1)), 0.5 * (h[m - 1] - h[m + 1])) };
            let a = jd / hd;
            if m as f64 > t && a.norm() < 1e-14 {
                break;
            }
            ratios.push(a);
        }
        Ok(Self { k, radius, center, ratios })
    }

    /// F(x̂; d).
    pub fn farfield(&self, obs: PlanePoint, inc: PlanePoint) -> C64 {
        let dt = obs.theta() - inc.theta();
        let mut sum = self.ratios[0];
        for (m, a) in self.ratios.iter().enumerate().skip(1) {
            sum += 2.0 * a * (m as f64 * dt).cos();
        }
        let pre = -(2.0 / (PI * self.k)).sqrt() * C64::from_polar(1.0, -FRAC_PI_4);
        let shift = C64::from_polar(1.0, self.k * (inc - obs).dot(&self.center));
        pre * sum * shift
    }

    /// Eigenvalues 1 − 2a_m of the scattering operator on e^{imθ}.
    pub fn scattering_eigenvalues(&self) -> Vec<C64> {
        self.ratios.iter().map(|a| 1.0 - 2.0 * a).collect()
    }
}

/// F(x̂; d) for the sound-hard disc of radius a about `center`.
pub fn disc_farfield(radius: f64, center: PlanePoint, obs: PlanePoint, inc: PlanePoint, k: f64) -> Result<C64> {
    Ok(DiscSeries::new(radius, center, k)?.farfield(obs, inc))
}
