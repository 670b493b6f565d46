//! Band-limited evaluation of the indicator.
//!
//! F is projected onto the modes |p|, |q| ≤ P, F(φ; d) ≈ Σ a_pq e^{ipφ} e^{−iqd},
//! and the density enters through its Fourier coefficients
//! ĝ_q = Σ_m β_m (−i)^{q−m} J_{q−m}(k|y|) e^{−i(q−m)θ_y}, formed in log-magnitude.
//! Then I = (2π)² ĝ^H A ĝ. Node values of g, whose size grows like Σ|β_m|, never
//! appear, so the form keeps relative accuracy where the node sum cancels.
//!
//! The outer rings of A sit at the rounding (or noise) plateau of the data. Modes
//! that never rise above ten times that plateau are dropped: they carry no
//! resolvable signal, and ĝ is largest exactly there.

use super::{check_consistency, check_resolution, classify, validate_ns, Classification, IndicatorTrace, ABS_CLAMP};
use crate::forward::FarFieldMatrix;
use crate::geom::PlanePoint;
use crate::herglotz::{density_coeffs, DensityCoeffs, DensitySpec};
use crate::specfun::{bessel_j_seq, ScheduleParams};
use crate::vekua::ConeSpec;
use crate::{Result, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::{E, FRAC_PI_2, TAU};

/// Modal coefficients of a far-field matrix.
#[derive(Debug, Clone)]
pub struct ModalForm {
    /// Retained band |p| ≤ P after discarding modes below the noise plateau.
    pub p: usize,
    /// Band before discarding, min(⌈ekR⌉ + 16, M/2 − 1).
    pub p_max: usize,
    /// Largest |a_pq| on the two outermost rings.
    pub noise_floor: f64,
    pub k: f64,
    pub m: usize,
    a: DMatrix<C64>,
}

/// Largest max|a| over the ring of modes with max(|p|, |q|) = r, for r = 0..=p.
fn ring_maxima(a: &DMatrix<C64>, p: usize) -> Vec<f64> {
    let mut rings = vec![0.0_f64; p + 1];
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let r = i.abs_diff(p).max(j.abs_diff(p));
            rings[r] = rings[r].max(a[(i, j)].norm());
        }
    }
    rings
}

/// Retained band and noise plateau: the plateau is the largest entry on the two
/// outermost rings, and the band ends at the last ring exceeding ten times it.
fn signal_band(a: &DMatrix<C64>, p: usize) -> (usize, f64) {
    if p < 2 {
        return (p, 0.0);
    }
    let rings = ring_maxima(a, p);
    let floor = rings[p].max(rings[p - 1]);
    if floor == 0.0 {
        return (p, 0.0);
    }
    let band = (0..=p).rev().find(|&r| rings[r] > 10.0 * floor).unwrap_or(0);
    (band, floor)
}

impl ModalForm {
    /// Projects F onto |p|, |q| ≤ min(⌈ekR⌉ + 16, M/2 − 1), then keeps the signal band.
    pub fn new(f: &FarFieldMatrix, radius: f64) -> Result<Self> {
        let m = f.m;
        let p = ((E * f.k * radius).ceil() as usize + 16).min(m / 2 - 1);
        let width = 2 * p + 1;
        let roots: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, TAU * j as f64 / m as f64)).collect();
        let root = |e: i64| roots[e.rem_euclid(m as i64) as usize];
        let modes: Vec<i64> = (-(p as i64)..=p as i64).collect();
        let mut b = DMatrix::<C64>::zeros(width, m);
        for (r, &pm) in modes.iter().enumerate() {
            for i in 0..m {
                let w = root(-pm * i as i64);
                for j in 0..m {
                    b[(r, j)] += w * f.get(i, j);
                }
            }
        }
        let mut a = DMatrix::<C64>::zeros(width, width);
        for r in 0..width {
            for (c, &qm) in modes.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    acc += b[(r, j)] * root(qm * j as i64);
                }
                a[(r, c)] = acc / (m * m) as f64;
            }
        }
        let (band, noise_floor) = signal_band(&a, p);
        let a = a.view((p - band, p - band), (2 * band + 1, 2 * band + 1)).into_owned();
        Ok(Self { p: band, p_max: p, noise_floor, k: f.k, m, a })
    }

    /// ĝ_q for q = −P..P.
    pub fn density_modes(&self, c: &DensityCoeffs, y: PlanePoint) -> Result<DVector<C64>> {
        let p = self.p as i64;
        let deg = c.beta.len() as i64 - 1;
        let t = self.k * y.r();
        let mut out = DVector::<C64>::zeros(2 * self.p + 1);
        if t == 0.0 {
            for q in 0..=p.min(deg) {
                out[(q + p) as usize] = c.beta[q as usize];
            }
            return Ok(out);
        }
        let seq = bessel_j_seq((p + deg) as u32, t)?;
        let theta = y.theta();
        let lb: Vec<(f64, f64)> = c.beta.iter().map(|b| (b.norm().ln(), b.arg())).collect();
        for q in -p..=p {
            let mut acc = C64::new(0.0, 0.0);
            for (mi, &(lnb, argb)) in lb.iter().enumerate() {
                let l = q - mi as i64;
                let (lj, mut sj) = seq.ln_j(l.unsigned_abs() as u32);
                if l < 0 && l % 2 != 0 {
                    sj = -sj;
                }
                let mag = (lnb + lj).exp();
                if mag == 0.0 {
                    continue;
                }
                acc += sj * C64::from_polar(mag, argb - l as f64 * (FRAC_PI_2 + theta));
            }
            out[(q + p) as usize] = acc;
        }
        Ok(out)
    }

    /// (2π)² ĝ^H A ĝ.
    pub fn value_from_coeffs(&self, c: &DensityCoeffs, y: PlanePoint) -> Result<C64> {
        let g = self.density_modes(c, y)?;
        let ag = &self.a * &g;
        Ok(g.dotc(&ag) * (TAU * TAU))
    }

    /// Indicator of a density specification.
    pub fn value(&self, spec: &DensitySpec) -> Result<C64> {
        let probe = FarFieldMatrix { m: self.m, k: self.k, provenance: crate::forward::Provenance::Analytic, entries: Vec::new() };
        check_consistency(&probe, spec.k)?;
        check_resolution(&probe, spec)?;
        self.value_from_coeffs(&density_coeffs(spec)?, spec.probe.apex)
    }

    /// Trace over `ns` with s = s(N), classified with dead-band `delta`.
    pub fn trace(&self, probe: ConeSpec, schedule: ScheduleParams, ns: &[u32], delta: f64) -> Result<IndicatorTrace> {
        validate_ns(ns)?;
        let mut s = Vec::with_capacity(ns.len());
        let mut values = Vec::with_capacity(ns.len());
        for &big_n in ns {
            let spec = DensitySpec::new(probe, big_n, schedule, self.k)?;
            s.push(spec.s());
            values.push(self.value(&spec)?);
        }
        let clamped: Vec<bool> = values.iter().map(|v| !(v.norm() >= ABS_CLAMP)).collect();
        let abs: Vec<f64> = values.iter().map(|v| v.norm().max(ABS_CLAMP)).collect();
        let (classification, slope) = if values.iter().all(|v| v.norm() == 0.0) {
            (Classification::Decay, f64::NEG_INFINITY)
        } else {
            classify(ns, &abs, &clamped, delta)
        };
        Ok(IndicatorTrace { probe, ns: ns.to_vec(), s, values, abs, clamped, classification, slope })
    }
}
