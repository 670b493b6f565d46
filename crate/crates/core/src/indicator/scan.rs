//! Grid scan for the visible part.

use super::{ModalForm, DEFAULT_DELTA};
use crate::forward::FarFieldMatrix;
use crate::geom::PlanePoint;
use crate::indicator::{check_consistency, Classification};
use crate::specfun::{MLOrder, ScheduleParams};
use crate::vekua::ConeSpec;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Rectangular lattice, rows from the top (largest x2) down, columns left to right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half: f64, count: usize) -> Self {
        Self { x1_min: -half, x1_max: half, x2_min: -half, x2_max: half, nx: count, ny: count }
    }

    pub fn points(&self) -> Vec<PlanePoint> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for r in 0..self.ny {
            let x2 = step(self.x2_max, self.x2_min, self.ny, r);
            for c in 0..self.nx {
                out.push(PlanePoint::new(step(self.x1_min, self.x1_max, self.nx, c), x2));
            }
        }
        out
    }
}

/// Scan parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub grid: GridSpec,
    pub omega_count: usize,
    pub n_list: Vec<u32>,
    pub gamma: f64,
    pub ns: Vec<u32>,
    pub delta: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::square(1.4, 21),
            omega_count: 16,
            n_list: vec![1, 2],
            gamma: 0.5,
            ns: (8..=24).collect(),
            delta: DEFAULT_DELTA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Visible,
    NotShownVisible,
}

/// The first probe found to decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: f64,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityMap {
    pub grid: GridSpec,
    pub points: Vec<PlanePoint>,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Option<Witness>>,
}

impl VisibilityMap {
    pub fn visible_count(&self) -> usize {
        self.verdicts.iter().filter(|v| **v == Verdict::Visible).count()
    }
}

fn probe_point(form: &ModalForm, y: PlanePoint, cfg: &ScanConfig, schedules: &[(MLOrder, ScheduleParams)]) -> Result<Option<Witness>> {
    for j in 0..cfg.omega_count {
        let omega = TAU * j as f64 / cfg.omega_count as f64;
        for &(n, sch) in schedules {
            let cone = ConeSpec::new(y, PlanePoint::unit(omega), n)?;
            if form.trace(cone, sch, &cfg.ns, cfg.delta)?.classification == Classification::Decay {
                return Ok(Some(Witness { omega, n: n.n() }));
            }
        }
    }
    Ok(None)
}

/// Marks each grid point Visible on the first probe (ω outer, n inner) whose
/// trace decays. Parallel over grid points; the result does not depend on the
/// thread count.
pub fn visible_scan(
    f: &FarFieldMatrix,
    k: f64,
    radius: f64,
    cfg: &ScanConfig,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<VisibilityMap> {
    check_consistency(f, k)?;
    if cfg.omega_count == 0 || cfg.n_list.is_empty() || cfg.grid.nx == 0 || cfg.grid.ny == 0 {
        return Err(Error::Precondition("scan needs directions, orders and a nonempty grid".into()));
    }
    let points = cfg.grid.points();
    if let Some(p) = points.iter().find(|p| !(p.r() < radius)) {
        return Err(Error::Precondition(format!("grid point ({}, {}) is not inside the disc of radius {radius}", p.x1, p.x2)));
    }
    let schedules = cfg
        .n_list
        .iter()
        .map(|&n| {
            let o = MLOrder::new(n)?;
            Ok((o, ScheduleParams::new(cfg.gamma, radius, o)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let form = ModalForm::new(f, radius)?;
    let done = AtomicUsize::new(0);
    let total = points.len();
    let witnesses = points
        .par_iter()
        .map(|&y| {
            let w = probe_point(&form, y, cfg, &schedules);
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                cb(d, total);
            }
            w
        })
        .collect::<Result<Vec<_>>>()?;
    let verdicts = witnesses.iter().map(|w| if w.is_some() { Verdict::Visible } else { Verdict::NotShownVisible }).collect();
    Ok(VisibilityMap { grid: cfg.grid, points, verdicts, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::Provenance;

    #[test]
    fn grid_ordering() {
        let g = GridSpec { x1_min: 0.0, x1_max: 1.0, x2_min: -1.0, x2_max: 1.0, nx: 2, ny: 3 };
        let p = g.points();
        assert_eq!(p[0], PlanePoint::new(0.0, 1.0));
        assert_eq!(p[1], PlanePoint::new(1.0, 1.0));
        assert_eq!(p[5], PlanePoint::new(1.0, -1.0));
    }

    #[test]
    fn empty_scene_all_visible() {
        let f = FarFieldMatrix::zeros(160, 2.0, Provenance::Analytic);
        let cfg = ScanConfig { grid: GridSpec::square(1.0, 3), ..Default::default() };
        let map = visible_scan(&f, 2.0, 2.0, &cfg, None).unwrap();
        assert_eq!(map.visible_count(), 9);
        assert_eq!(map.witnesses[0], Some(Witness { omega: 0.0, n: 1 }));
    }

    #[test]
    fn rejects_grid_outside() {
        let f = FarFieldMatrix::zeros(160, 2.0, Provenance::Analytic);
        let cfg = ScanConfig { grid: GridSpec::square(2.0, 3), ..Default::default() };
        assert!(matches!(visible_scan(&f, 2.0, 2.0, &cfg, None), Err(Error::Precondition(_))));
    }
}
