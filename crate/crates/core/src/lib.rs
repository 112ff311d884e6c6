//! Hyperelastic constitutive-model discovery: sparse physics-augmented
//! potentials, a polyconvexity indicator, L0-gated pre-training and adjoint
//! finite element calibration against full-field displacement data.

pub mod adjoint;
pub mod diff;
pub mod error;
pub mod fem;
pub mod io;
pub mod kinematics;
pub mod materials;
pub mod matpoint;
pub mod model;
pub mod pann;
pub mod polyconvexity;
pub mod sampling;
pub mod training;

pub use error::{Error, Result};
