//! Forward scattering by sound-hard obstacles.

pub mod curve;
pub mod disc;
pub mod eigen_guard;
pub mod matrix;
pub mod mfs;
pub mod scene;

pub use curve::{CurveKind, CurveSample, Fourier, ObstacleCurve};
pub use disc::{disc_farfield, DiscSeries};
pub use eigen_guard::{neumann_eigen_guard, GuardReport};
pub use matrix::{farfield_matrix, load_matrix, min_nodes, save_matrix, FarFieldMatrix, ForwardMethod, ForwardReport, Provenance};
pub use mfs::{mfs_solve, MfsFarField, MfsOptions, MfsSolver};
pub use scene::{Scene, SceneFile};
