//! Discretized far-field operator and its text file format.

use super::curve::CurveKind;
use super::disc::DiscSeries;
use super::mfs::{mfs_solve, MfsOptions};
use super::scene::Scene;
use crate::geom::PlanePoint;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, FRAC_PI_4, TAU};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// Smallest node count of a stored matrix.
pub const MIN_NODES: usize = 16;

/// Which solver produced the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Mfs,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Mfs => "mfs",
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "mfs" => Ok(Self::Mfs),
            _ => Err(Error::Format(format!("unknown provenance tag {s:?}"))),
        }
    }
}

/// Solver selection for [`farfield_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForwardMethod {
    /// Disc series for a single disc, MFS otherwise.
    #[default]
    Auto,
    Analytic,
    Mfs,
}

/// F[i][j] = F_D(φ_i; φ_j, k) at φ_j = 2πj/M, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    pub m: usize,
    pub k: f64,
    pub provenance: Provenance,
    pub entries: Vec<C64>,
}

/// Solver diagnostics recorded while assembling a matrix.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ForwardReport {
    pub max_boundary_residual: Option<f64>,
    pub unknowns: Option<usize>,
    pub rank: Option<usize>,
    pub warnings: Vec<String>,
}

/// Smallest admissible node count max(2⌈ekR⌉, 64), rounded up to even.
pub fn min_nodes(k: f64, radius: f64) -> usize {
    let m = (2 * (E * k * radius).ceil() as usize).max(64);
    m + m % 2
}

/// The unit vector φ_j = (cos 2πj/M, sin 2πj/M).
pub fn node(j: usize, m: usize) -> PlanePoint {
    PlanePoint::unit(TAU * j as f64 / m as f64)
}

impl FarFieldMatrix {
    pub fn zeros(m: usize, k: f64, provenance: Provenance) -> Self {
        Self { m, k, provenance, entries: vec![C64::new(0.0, 0.0); m * m] }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.m + j]
    }

    pub fn nodes(&self) -> Vec<PlanePoint> {
        (0..self.m).map(|j| node(j, self.m)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// max |F(φ_i; φ_j) − F(−φ_j; −φ_i)| relative to max |F| (0 for F = 0).
    pub fn reciprocity_residual(&self) -> f64 {
        let (m, h) = (self.m, self.m / 2);
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((self.get(i, j) - self.get((j + h) % m, (i + h) % m)).norm());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// The discrete scattering operator S = I + e^{iπ/4}√(k/2π)(2π/M) F.
    pub fn scattering_operator(&self) -> DMatrix<C64> {
        let c = C64::from_polar((self.k / TAU).sqrt() * TAU / self.m as f64, FRAC_PI_4);
        DMatrix::from_fn(self.m, self.m, |i, j| {
            let d = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            d + c * self.get(i, j)
        })
    }

    /// Spectral norm ‖S*S − I‖.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.scattering_operator();
        let d = s.adjoint() * &s - DMatrix::<C64>::identity(self.m, self.m);
        d.singular_values().max()
    }

    /// Adds complex Gaussian noise of standard deviation level·max|F| per entry.
    pub fn add_noise(&mut self, level: f64, seed: u64) {
        let sigma = level * self.max_abs() / 2f64.sqrt();
        let mut rng = StdRng::seed_from_u64(seed);
        for e in &mut self.entries {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *e += sigma * C64::new(re, im);
        }
    }

    /// FFM v1 text.
    pub fn to_text(&self) -> String {
        let mut body = String::with_capacity(self.m * self.m * 56);
        for i in 0..self.m {
            for j in 0..self.m {
                let v = self.get(i, j);
                writeln!(body, "{i} {j} {:.16e} {:.16e}", v.re, v.im).expect("writing to a String");
            }
        }
        let crc = crc32fast::hash(body.as_bytes());
        format!("FFM v1\nM={} k={:.16e} provenance={}\n{body}crc32={crc:08x}\n", self.m, self.k, self.provenance.tag())
    }

    /// Parses FFM v1 text.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.split_inclusive('\n');
        let version = lines.next().ok_or_else(|| Error::Format("empty matrix file".into()))?.trim_end();
        match version.strip_prefix("FFM ") {
            Some("v1") => {}
            Some(v) => return Err(Error::UnsupportedVersion(v.to_string())),
            None => return Err(Error::Format(format!("bad magic line {version:?}"))),
        }
        let header = lines.next().ok_or_else(|| Error::Format("missing header".into()))?.trim_end();
        let (mut m, mut k, mut prov) = (None, None, None);
        for field in header.split_whitespace() {
            let (key, val) = field.split_once('=').ok_or_else(|| Error::Format(format!("bad header field {field:?}")))?;
            let bad = |_| Error::Format(format!("bad header value {field:?}"));
            match key {
                "M" => m = Some(val.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "k" => k = Some(val.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "provenance" => prov = Some(val.parse::<Provenance>()?),
                _ => return Err(Error::Format(format!("unknown header field {key:?}"))),
            }
        }
        let (m, k, provenance) = match (m, k, prov) {
            (Some(m), Some(k), Some(p)) => (m, k, p),
            _ => return Err(Error::Format("header must give M, k and provenance".into())),
        };
        let rest: Vec<&str> = lines.collect();
        let (last, body) = rest.split_last().ok_or_else(|| Error::Checksum { expected: "missing".into(), found: "none".into() })?;
        let body: String = body.concat();
        let found = format!("{:08x}", crc32fast::hash(body.as_bytes()));
        let expected =
            last.trim_end().strip_prefix("crc32=").ok_or_else(|| Error::Checksum { expected: "missing".into(), found: found.clone() })?;
        if !last.ends_with('\n') || expected != found {
            return Err(Error::Checksum { expected: expected.to_string(), found });
        }
        if m < MIN_NODES || m % 2 != 0 {
            return Err(Error::Format(format!("node count {m} must be even and at least {MIN_NODES}")));
        }
        let mut entries = Vec::with_capacity(m * m);
        for (n, line) in body.lines().enumerate() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Format(format!("malformed entry line {}", n + 3));
            if parts.len() != 4 {
                return Err(bad());
            }
            let i: usize = parts[0].parse().map_err(|_| bad())?;
            let j: usize = parts[1].parse().map_err(|_| bad())?;
            if i * m + j != n || j >= m {
                return Err(Error::Format(format!("dimension mismatch at entry line {}", n + 3)));
            }
            entries.push(C64::new(parts[2].parse().map_err(|_| bad())?, parts[3].parse().map_err(|_| bad())?));
        }
        if entries.len() != m * m {
            return Err(Error::Format(format!("dimension mismatch: {} entries for M = {m}", entries.len())));
        }
        Ok(Self { m, k, provenance, entries })
    }
}

pub fn save_matrix(f: &FarFieldMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, f.to_text())?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<FarFieldMatrix> {
    FarFieldMatrix::from_text(&std::fs::read_to_string(path)?)
}

/// Far-field matrix of the scene at M nodes.
pub fn farfield_matrix(scene: &Scene, m: usize, method: ForwardMethod, mfs: MfsOptions) -> Result<(FarFieldMatrix, ForwardReport)> {
    let need = min_nodes(scene.k, scene.radius);
    if m % 2 != 0 || m < need {
        return Err(Error::Precondition(format!("node count must be even and at least {need}, got {m}")));
    }
    if scene.obstacles.is_empty() {
        return Ok((FarFieldMatrix::zeros(m, scene.k, Provenance::Analytic), ForwardReport::default()));
    }
    let single_disc = match (scene.obstacles.len(), &scene.obstacles[0].kind) {
        (1, CurveKind::Disc { center, radius }) => Some((*center, *radius)),
        _ => None,
    };
    let nodes: Vec<PlanePoint> = (0..m).map(|j| node(j, m)).collect();
    let (columns, provenance, report) = match (method, single_disc) {
        (ForwardMethod::Analytic, None) => return Err(Error::Precondition("the analytic solver handles a single disc only".into())),
        (ForwardMethod::Analytic | ForwardMethod::Auto, Some((c, a))) => {
            let s = DiscSeries::new(a, c, scene.k)?;
            let cols: Vec<Vec<C64>> = nodes.par_iter().map(|&d| nodes.iter().map(|&x| s.farfield(x, d)).collect()).collect();
            (cols, Provenance::Analytic, ForwardReport::default())
        }
        _ => {
            let f = mfs_solve(&scene.obstacles, scene.k, &nodes, &nodes, mfs)?;
            let report = ForwardReport {
                max_boundary_residual: Some(f.max_residual),
                unknowns: Some(f.unknowns),
                rank: Some(f.rank),
                warnings: f.warnings,
            };
            (f.values, Provenance::Mfs, report)
        }
    };
    let mut out = FarFieldMatrix::zeros(m, scene.k, provenance);
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            out.entries[i * m + j] = *v;
        }
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::curve::ObstacleCurve;

    fn disc_scene(c: PlanePoint) -> Scene {
        Scene::new(vec![ObstacleCurve::disc(c, 0.3).unwrap()], 2.0, 2.0).unwrap()
    }

    #[test]
    fn centered_disc_rows_are_shifts() {
        let (f, _) = farfield_matrix(&disc_scene(PlanePoint::ORIGIN), 64, ForwardMethod::Auto, MfsOptions::default()).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert!((f.get(i, j) - f.get(0, (j + 64 - i) % 64)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn reciprocity_and_unitarity() {
        let scene = disc_scene(PlanePoint::new(0.5, 0.0));
        let (a, _) = farfield_matrix(&scene, 64, ForwardMethod::Analytic, MfsOptions::default()).unwrap();
        assert!(a.reciprocity_residual() < 1e-13);
        assert!(a.unitarity_defect() < 1e-12);
        let (b, rep) = farfield_matrix(&scene, 64, ForwardMethod::Mfs, MfsOptions::default()).unwrap();
        assert_eq!(b.provenance, Provenance::Mfs);
        assert!(rep.max_boundary_residual.unwrap() < 1e-6);
        assert!(b.reciprocity_residual() < 1e-6);
        assert!(b.unitarity_defect() < 1e-6);
    }

    #[test]
    fn kite_unitarity_improves_with_refinement() {
        let scene = Scene::new(vec![ObstacleCurve::kite(PlanePoint::new(0.2, 0.1), 0.4, 0.3).unwrap()], 2.0, 2.0).unwrap();
        let coarse = MfsOptions { sources: Some(64), residual_tol: 1.0, ..Default::default() };
        let (a, _) = farfield_matrix(&scene, 64, ForwardMethod::Mfs, coarse).unwrap();
        let (b, _) = farfield_matrix(&scene, 64, ForwardMethod::Mfs, MfsOptions::default()).unwrap();
        assert!(b.unitarity_defect() < a.unitarity_defect());
        assert!(b.unitarity_defect() < 1e-6);
        assert!(b.reciprocity_residual() < 1e-6);
    }

    #[test]
    fn refinement_keeps_common_nodes() {
        let scene = disc_scene(PlanePoint::new(0.5, 0.2));
        let (a, _) = farfield_matrix(&scene, 64, ForwardMethod::Auto, MfsOptions::default()).unwrap();
        let (b, _) = farfield_matrix(&scene, 128, ForwardMethod::Auto, MfsOptions::default()).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert!((a.get(i, j) - b.get(2 * i, 2 * j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn empty_scene_and_preconditions() {
        let scene = Scene::empty(2.0, 2.0).unwrap();
        let (f, _) = farfield_matrix(&scene, 64, ForwardMethod::Auto, MfsOptions::default()).unwrap();
        assert!(f.entries.iter().all(|c| *c == C64::new(0.0, 0.0)));
        assert_eq!(f.reciprocity_residual(), 0.0);
        assert!(farfield_matrix(&scene, 65, ForwardMethod::Auto, MfsOptions::default()).is_err());
        assert!(farfield_matrix(&scene, 32, ForwardMethod::Auto, MfsOptions::default()).is_err());
        assert_eq!(min_nodes(10.0, 2.0), 110);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let (mut f, _) = farfield_matrix(&disc_scene(PlanePoint::new(0.5, 0.0)), 64, ForwardMethod::Auto, MfsOptions::default()).unwrap();
        f.add_noise(1e-3, 7);
        let text = f.to_text();
        let g = FarFieldMatrix::from_text(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_text(), text);
    }

    proptest::proptest! {
        #[test]
        fn arbitrary_entries_round_trip(vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 2 * 16 * 16), k in 0.1f64..50.0) {
            let mut f = FarFieldMatrix::zeros(16, k, Provenance::Mfs);
            for (e, c) in f.entries.iter_mut().zip(vals.chunks(2)) {
                *e = C64::new(c[0], c[1]);
            }
            proptest::prop_assert_eq!(FarFieldMatrix::from_text(&f.to_text()).unwrap(), f);
        }
    }

    #[test]
    fn file_errors() {
        let f = FarFieldMatrix::zeros(16, 2.0, Provenance::Mfs);
        let text = f.to_text();
        let cut = &text[..text.len() / 2];
        assert!(matches!(FarFieldMatrix::from_text(cut), Err(Error::Checksum { .. })));
        let v2 = text.replacen("FFM v1", "FFM v2", 1);
        assert!(matches!(FarFieldMatrix::from_text(&v2), Err(Error::UnsupportedVersion(_))));
        let flipped = text.replacen("0 1 0.0000000000000000e0", "0 1 1.0000000000000000e0", 1);
        assert_ne!(flipped, text);
        assert!(matches!(FarFieldMatrix::from_text(&flipped), Err(Error::Checksum { .. })));
        let garbage = text.replacen("M=16", "M=sixteen", 1);
        assert!(matches!(FarFieldMatrix::from_text(&garbage), Err(Error::Format(_))));
        let wrong_m = text.replacen("M=16", "M=18", 1);
        assert!(matches!(FarFieldMatrix::from_text(&wrong_m), Err(Error::Format(_))));
    }

    #[test]
    fn noise_is_seeded() {
        let base = FarFieldMatrix { entries: vec![C64::new(1.0, 0.0); 256], ..FarFieldMatrix::zeros(16, 2.0, Provenance::Mfs) };
        let (mut a, mut b, mut c) = (base.clone(), base.clone(), base.clone());
        a.add_noise(0.1, 1);
        b.add_noise(0.1, 1);
        c.add_noise(0.1, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let var: f64 = a.entries.iter().map(|e| (e - 1.0).norm_sqr()).sum::<f64>() / 256.0;
        assert!((var.sqrt() - 0.1).abs() < 0.02);
    }
}
