//! Blended low/high-order finite-volume schemes for the 1D Euler equations.
//!
//! The interface flux is `α·g + (1−α)·h` with a dissipative flux `g`, an
//! entropy-conservative flux `h` and α chosen per interface by one of
//! several rules: a discrete entropy bound, a positivity bound, polynomial
//! annihilation, a trained network, or an entropy-rate predictor.

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod flux;
pub mod limiters;
pub mod mesh;
pub mod nn;
pub mod pa;
pub mod scheme;

pub use error::{Error, Result};
pub use euler::{ConservedState, EntropyPairValue, FluxValue, GasModel, Primitive};
pub use flux::{FluxKind, InterfaceFluxes, TimeQuadrature};
pub use mesh::{BoundaryKind, FieldSnapshot, Grid1D};
pub use nn::MlpModel;
pub use scheme::{advance, InterfaceBlend, RunConfig, Scheme, SchemePreset, Trajectory};
