//! Proximity of k² to interior Neumann eigenvalues.

use super::curve::CurveKind;
use super::scene::Scene;
use crate::specfun::jprime_zeros;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Distance in ka below which a warning is raised.
pub const GUARD_THRESHOLD: f64 = 1e-2;
const ORDERS: u32 = 20;
const ZEROS: usize = 20;

/// (m, l, j'_{m,l}) for m ≤ 20 and the first 20 positive zeros, sorted.
pub fn jprime_table() -> &'static [(u32, usize, f64)] {
    static TABLE: OnceLock<Vec<(u32, usize, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::new();
        for m in 0..=ORDERS {
            let z = jprime_zeros(m, ZEROS).expect("zeros lie inside the Bessel envelope");
            t.extend(z.into_iter().enumerate().map(|(l, v)| (m, l + 1, v)));
        }
        t.sort_by(|a, b| a.2.total_cmp(&b.2));
        t
    })
}

/// Guard outcome for one obstacle.
#[derive(Debug, Clone, Serialize)]
pub struct GuardEntry {
    pub obstacle: usize,
    /// k times the disc radius (equal-area radius for other shapes).
    pub ka: f64,
    pub nearest_zero: f64,
    pub order: u32,
    pub index: usize,
    pub distance: f64,
    /// True when the radius is the equal-area surrogate of a non-disc shape.
    pub heuristic: bool,
    pub warning: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GuardReport {
    pub entries: Vec<GuardEntry>,
    pub threshold: f64,
    pub warning: bool,
}

/// Distance from ka to the nearest tabulated J_m' zero for each obstacle.
pub fn neumann_eigen_guard(scene: &Scene) -> GuardReport {
    let table = jprime_table();
    let entries: Vec<GuardEntry> = scene
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (a, heuristic) = match c.kind {
                CurveKind::Disc { radius, .. } => (radius, false),
                _ => ((c.signed_area() / PI).sqrt(), true),
            };
            let ka = scene.k * a;
            let &(order, index, nearest_zero) =
                table.iter().min_by(|x, y| (x.2 - ka).abs().total_cmp(&(y.2 - ka).abs())).expect("table is nonempty");
            let distance = (nearest_zero - ka).abs();
            GuardEntry { obstacle: i, ka, nearest_zero, order, index, distance, heuristic, warning: distance < GUARD_THRESHOLD }
        })
        .collect();
    let warning = entries.iter().any(|e| e.warning);
    GuardReport { entries, threshold: GUARD_THRESHOLD, warning }
}
