//! Enclosure-method reconstruction of the visible part of sound-hard obstacles
//! from far-field data in two dimensions.
//!
//! The crate is organised bottom-up: [`specfun`] holds scalar special functions,
//! [`vekua`] the Vekua transform and modified Mittag-Leffler functions,
//! [`herglotz`] the explicit densities and their Herglotz wave functions,
//! [`forward`] synthesizes far-field operators, and [`indicator`] evaluates and
//! classifies the indicator function. [`verify`] bundles invariant suites.

// Negated comparisons are how NaN inputs get rejected; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod error;
pub mod forward;
pub mod geom;
pub mod herglotz;
pub mod indicator;
pub mod quad;
pub mod specfun;
pub mod vekua;
pub mod verify;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
