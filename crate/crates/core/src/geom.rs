//! Planar points and unit directions.

use crate::C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x1: f64,
    pub x2: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// Unit vector at angle `theta`.
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x1: c, x2: s }
    }

    pub fn r(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn theta(&self) -> f64 {
        self.x2.atan2(self.x1)
    }

    /// The complex number x1 + i x2.
    pub fn z(&self) -> C64 {
        C64::new(self.x1, self.x2)
    }

    pub fn from_z(z: C64) -> Self {
        Self { x1: z.re, x2: z.im }
    }

    pub fn dot(&self, o: &PlanePoint) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2
    }

    /// Counter-clockwise quarter turn, so that (ω, ω⊥) is positively oriented.
    pub fn perp(&self) -> Self {
        Self { x1: -self.x2, x2: self.x1 }
    }

    /// Rotation by angle `rho` about the origin.
    pub fn rotate(&self, rho: f64) -> Self {
        Self::from_z(self.z() * C64::from_polar(1.0, rho))
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Returns the normalized vector, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let r = self.r();
        (r > 0.0 && r.is_finite()).then(|| Self::new(self.x1 / r, self.x2 / r))
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.x1, -self.x2)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, a: f64) -> PlanePoint {
        PlanePoint::new(self.x1 * a, self.x2 * a)
    }
}
