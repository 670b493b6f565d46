//! Scenes: obstacles, wave number and enclosing radius.

use super::curve::{Fourier, ObstacleCurve};
use crate::geom::PlanePoint;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Minimum sampled distance between distinct obstacles.
pub const MIN_GAP: f64 = 1e-3;

/// Sound-hard obstacles inside the open disc B_R, probed at wave number k.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<ObstacleCurve>,
    pub k: f64,
    pub radius: f64,
}

/// Obstacle entry of a scene file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleEntry {
    Disc { params: DiscParams },
    Ellipse { params: EllipseParams },
    Kite { params: KiteParams },
    Custom { fourier_coeffs: FourierPair },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscParams {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub center: [f64; 2],
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KiteParams {
    pub center: [f64; 2],
    pub scale: f64,
    #[serde(default)]
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPair {
    pub x1: Fourier,
    pub x2: Fourier,
}

/// On-disk scene: `{"k": .., "R": .., "obstacles": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub k: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub obstacles: Vec<ObstacleEntry>,
}

fn point(c: [f64; 2]) -> PlanePoint {
    PlanePoint::new(c[0], c[1])
}

impl ObstacleEntry {
    pub fn to_curve(&self) -> Result<ObstacleCurve> {
        match self {
            Self::Disc { params: p } => ObstacleCurve::disc(point(p.center), p.radius),
            Self::Ellipse { params: p } => ObstacleCurve::ellipse(point(p.center), p.a, p.b, p.angle),
            Self::Kite { params: p } => ObstacleCurve::kite(point(p.center), p.scale, p.angle),
            Self::Custom { fourier_coeffs: f } => ObstacleCurve::custom(f.x1.clone(), f.x2.clone()),
        }
    }
}

impl Scene {
    /// Validated scene.
    pub fn new(obstacles: Vec<ObstacleCurve>, k: f64, radius: f64) -> Result<Self> {
        let s = Self { obstacles, k, radius };
        s.validate()?;
        Ok(s)
    }

    /// A scene without obstacles.
    pub fn empty(k: f64, radius: f64) -> Result<Self> {
        Self::new(Vec::new(), k, radius)
    }

    /// Checks k > 0, curve validity, containment in B_R and pairwise separation.
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!("wave number must be positive, got {}", self.k)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("enclosing radius must be positive, got {}", self.radius)));
        }
        let polys: Vec<Vec<PlanePoint>> = self.obstacles.iter().map(|c| c.polygon(512)).collect();
        for (i, c) in self.obstacles.iter().enumerate() {
            c.validate()?;
            if c.max_radius() >= self.radius {
                return Err(Error::Geometry(format!("obstacle {i} is not inside the disc of radius {}", self.radius)));
            }
        }
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let gap = polys[i].iter().flat_map(|p| polys[j].iter().map(move |q| (*p - *q).r())).fold(f64::INFINITY, f64::min);
                let nested = self.obstacles[i].contains(polys[j][0]) || self.obstacles[j].contains(polys[i][0]);
                if gap < MIN_GAP || nested {
                    return Err(Error::Geometry(format!("obstacles {i} and {j} overlap or are closer than {MIN_GAP}")));
                }
            }
        }
        Ok(())
    }

    /// Whether p lies in the closure of some obstacle (sampled).
    pub fn contains(&self, p: PlanePoint) -> bool {
        self.obstacles.iter().any(|c| c.contains(p))
    }

    pub fn from_file_data(f: &SceneFile) -> Result<Self> {
        let obstacles = f.obstacles.iter().map(|o| o.to_curve()).collect::<Result<Vec<_>>>()?;
        Self::new(obstacles, f.k, f.radius)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SceneFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("scene JSON: {e}")))?;
        Self::from_file_data(&f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
