//! Closed parametric obstacle boundaries given by truncated Fourier series.

use crate::geom::PlanePoint;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Truncated Fourier series a_0 + Σ_{j≥1} (a_j cos jt + b_j sin jt).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Fourier {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Fourier {
    /// Value at a complex parameter.
    pub fn eval_complex(&self, t: C64) -> C64 {
        let len = self.cos.len().max(self.sin.len());
        (0..len)
            .map(|j| {
                let a = self.cos.get(j).copied().unwrap_or(0.0);
                let b = if j == 0 { 0.0 } else { self.sin.get(j).copied().unwrap_or(0.0) };
                let jt = t * j as f64;
                a * jt.cos() + b * jt.sin()
            })
            .sum()
    }

    /// (value, first derivative, second derivative) at t.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (mut v, mut d, mut dd) = (0.0, 0.0, 0.0);
        let len = self.cos.len().max(self.sin.len());
        for j in 0..len {
            let a = self.cos.get(j).copied().unwrap_or(0.0);
            let b = if j == 0 { 0.0 } else { self.sin.get(j).copied().unwrap_or(0.0) };
            let jf = j as f64;
            let (s, c) = (jf * t).sin_cos();
            v += a * c + b * s;
            d += jf * (-a * s + b * c);
            dd -= jf * jf * (a * c + b * s);
        }
        (v, d, dd)
    }
}

/// Shape metadata recorded with each curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveKind {
    Disc { center: PlanePoint, radius: f64 },
    Ellipse { center: PlanePoint, a: f64, b: f64, angle: f64 },
    Kite { center: PlanePoint, scale: f64, angle: f64 },
    Custom,
}

/// Closed, positively oriented, smooth boundary curve t ∈ [0, 2π) → (x1, x2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleCurve {
    pub kind: CurveKind,
    pub x1: Fourier,
    pub x2: Fourier,
}

/// Point, tangent and second derivative at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub t: f64,
    pub point: PlanePoint,
    pub tangent: PlanePoint,
    pub accel: PlanePoint,
}

impl CurveSample {
    pub fn speed(&self) -> f64 {
        self.tangent.r()
    }

    /// Outward unit normal (tangent turned clockwise, for positive orientation).
    pub fn normal(&self) -> PlanePoint {
        let s = self.speed();
        PlanePoint::new(self.tangent.x2 / s, -self.tangent.x1 / s)
    }
}

fn rotated(center: PlanePoint, angle: f64, c1: [f64; 3], s1: [f64; 3], c2: [f64; 3], s2: [f64; 3]) -> (Fourier, Fourier) {
    // rotate the local curve (u(t), v(t)) by `angle` and translate to `center`
    let (sa, ca) = angle.sin_cos();
    let comb = |p: [f64; 3], q: [f64; 3], a: f64, b: f64| -> Vec<f64> { (0..3).map(|j| a * p[j] + b * q[j]).collect() };
    let mut x1 = Fourier { cos: comb(c1, c2, ca, -sa), sin: comb(s1, s2, ca, -sa) };
    let mut x2 = Fourier { cos: comb(c1, c2, sa, ca), sin: comb(s1, s2, sa, ca) };
    x1.cos[0] += center.x1;
    x2.cos[0] += center.x2;
    (x1, x2)
}

impl ObstacleCurve {
    /// Circle of radius `radius` about `center`.
    pub fn disc(center: PlanePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!("disc radius must be positive, got {radius}")));
        }
        let x1 = Fourier { cos: vec![center.x1, radius], sin: vec![0.0, 0.0] };
        let x2 = Fourier { cos: vec![center.x2, 0.0], sin: vec![0.0, radius] };
        Ok(Self { kind: CurveKind::Disc { center, radius }, x1, x2 })
    }

    /// Ellipse with semi-axes a, b rotated by `angle`.
    pub fn ellipse(center: PlanePoint, a: f64, b: f64, angle: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Geometry("ellipse semi-axes must be positive".into()));
        }
        let (x1, x2) = rotated(center, angle, [0.0, a, 0.0], [0.0; 3], [0.0; 3], [0.0, b, 0.0]);
        Ok(Self { kind: CurveKind::Ellipse { center, a, b, angle }, x1, x2 })
    }

    /// Kite (cos t + 0.65 cos 2t − 0.65, 1.5 sin t), scaled and rotated.
    pub fn kite(center: PlanePoint, scale: f64, angle: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Geometry("kite scale must be positive".into()));
        }
        let s = scale;
        let (x1, x2) = rotated(center, angle, [-0.65 * s, s, 0.65 * s], [0.0; 3], [0.0; 3], [0.0, 1.5 * s, 0.0]);
        Ok(Self { kind: CurveKind::Kite { center, scale, angle }, x1, x2 })
    }

    /// Curve from raw Fourier coefficients; validated for closure-compatible smoothness,
    /// simplicity and orientation.
    pub fn custom(x1: Fourier, x2: Fourier) -> Result<Self> {
        let c = Self { kind: CurveKind::Custom, x1, x2 };
        c.validate()?;
        Ok(c)
    }

    pub fn sample(&self, t: f64) -> CurveSample {
        let (a, da, dda) = self.x1.eval(t);
        let (b, db, ddb) = self.x2.eval(t);
        CurveSample { t, point: PlanePoint::new(a, b), tangent: PlanePoint::new(da, db), accel: PlanePoint::new(dda, ddb) }
    }

    /// Samples at t_j = 2πj/count.
    pub fn samples(&self, count: usize) -> Vec<CurveSample> {
        (0..count).map(|j| self.sample(TAU * j as f64 / count as f64)).collect()
    }

    /// Z(t + iδ) with Z = x1 + i x2 continued analytically in t; lies inside for
    /// small δ > 0.
    pub fn shifted_point(&self, t: f64, delta: f64) -> PlanePoint {
        let tc = C64::new(t, delta);
        PlanePoint::from_z(self.x1.eval_complex(tc) + C64::i() * self.x2.eval_complex(tc))
    }

    pub fn point(&self, t: f64) -> PlanePoint {
        self.sample(t).point
    }

    /// Signed enclosed area by the trapezoid rule (exact for trigonometric data).
    pub fn signed_area(&self) -> f64 {
        let m = 512;
        self.samples(m).iter().map(|s| 0.5 * (s.point.x1 * s.tangent.x2 - s.point.x2 * s.tangent.x1)).sum::<f64>() * TAU / m as f64
    }

    /// Area centroid.
    pub fn centroid(&self) -> PlanePoint {
        let m = 512;
        let area = self.signed_area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for s in self.samples(m) {
            let cross = s.point.x1 * s.tangent.x2 - s.point.x2 * s.tangent.x1;
            cx += s.point.x1 * cross;
            cy += s.point.x2 * cross;
        }
        let w = TAU / m as f64 / (3.0 * area);
        PlanePoint::new(cx * w, cy * w)
    }

    /// Arc length by the trapezoid rule.
    pub fn length(&self) -> f64 {
        let m = 512;
        self.samples(m).iter().map(|s| s.speed()).sum::<f64>() * TAU / m as f64
    }

    /// Largest |x| over the curve (sampled).
    pub fn max_radius(&self) -> f64 {
        self.samples(1024).iter().map(|s| s.point.r()).fold(0.0, f64::max)
    }

    /// Polygonal approximation for containment and intersection tests.
    pub fn polygon(&self, count: usize) -> Vec<PlanePoint> {
        self.samples(count).into_iter().map(|s| s.point).collect()
    }

    /// Point-in-curve test by ray casting against a dense polygon.
    pub fn contains(&self, p: PlanePoint) -> bool {
        point_in_polygon(&self.polygon(1024), p)
    }

    /// Checks nonzero speed, positive orientation and simplicity.
    pub fn validate(&self) -> Result<()> {
        let samples = self.samples(1024);
        let max_speed = samples.iter().map(|s| s.speed()).fold(0.0, f64::max);
        if !(max_speed > 0.0) || samples.iter().any(|s| !(s.speed() > 1e-9 * max_speed)) {
            return Err(Error::Geometry("curve has (near) zero speed".into()));
        }
        if self.signed_area() <= 0.0 {
            return Err(Error::Geometry("curve must be positively oriented".into()));
        }
        let poly = self.polygon(512);
        if polygon_self_intersects(&poly) {
            return Err(Error::Geometry("curve is not simple".into()));
        }
        Ok(())
    }
}

pub(crate) fn point_in_polygon(poly: &[PlanePoint], p: PlanePoint) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.x2 > p.x2) != (b.x2 > p.x2) {
            let x = a.x1 + (p.x2 - a.x2) / (b.x2 - a.x2) * (b.x1 - a.x1);
            if p.x1 < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn orient(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> f64 {
    (b.x1 - a.x1) * (c.x2 - a.x2) - (b.x2 - a.x2) * (c.x1 - a.x1)
}

pub(crate) fn segments_cross(a: PlanePoint, b: PlanePoint, c: PlanePoint, d: PlanePoint) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polygon_self_intersects(poly: &[PlanePoint]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_geometry() {
        let c = ObstacleCurve::disc(PlanePoint::new(0.5, 0.0), 0.3).unwrap();
        assert!((c.signed_area() - std::f64::consts::PI * 0.09).abs() < 1e-14);
        assert!((c.length() - TAU * 0.3).abs() < 1e-14);
        let ce = c.centroid();
        assert!((ce.x1 - 0.5).abs() < 1e-14 && ce.x2.abs() < 1e-14);
        let s = c.sample(0.0);
        assert!((s.normal().x1 - 1.0).abs() < 1e-15);
        assert!(c.contains(PlanePoint::new(0.6, 0.1)) && !c.contains(PlanePoint::new(0.9, 0.0)));
        c.validate().unwrap();
    }

    #[test]
    fn kite_and_ellipse_are_valid() {
        ObstacleCurve::kite(PlanePoint::ORIGIN, 0.5, 0.3).unwrap().validate().unwrap();
        ObstacleCurve::ellipse(PlanePoint::new(0.1, 0.2), 0.4, 0.2, 1.0).unwrap().validate().unwrap();
    }

    #[test]
    fn rejects_bad_curves() {
        let cw = ObstacleCurve::custom(
            Fourier { cos: vec![0.0, 1.0], sin: vec![0.0, 0.0] },
            Fourier { cos: vec![0.0, 0.0], sin: vec![0.0, -1.0] },
        );
        assert!(matches!(cw, Err(Error::Geometry(_))));
        let fig8 = ObstacleCurve::custom(
            Fourier { cos: vec![0.0, 0.0], sin: vec![0.0, 1.0] },
            Fourier { cos: vec![0.0, 0.0, 0.0], sin: vec![0.0, 0.0, 0.5] },
        );
        assert!(matches!(fig8, Err(Error::Geometry(_))));
        let point = ObstacleCurve::custom(Fourier { cos: vec![1.0], sin: vec![] }, Fourier::default());
        assert!(matches!(point, Err(Error::Geometry(_))));
    }
}
