//! Plane-strain nonlinear finite elements on linear triangles: meshes,
//! residual/tangent assembly, banded direct solves, displacement-controlled
//! Newton increments and synthetic full-field datasets.

mod assembly;
mod band;
mod dic;
mod mesh;
mod solve;

pub use assembly::{
    assemble, element_defgrad, plane_invariants, plane_stress, plane_tangent, residual_with, tangent_product,
    tangent_transpose_product, total_energy, Assembly, DofMap,
};
pub use band::{BandLu, BandMatrix};
pub use dic::{solve_path, synth_dic, DicDataset, DicStep, LoadSchedule, StepState};
pub use mesh::{default_specimen, plate, plate_with_holes, Hole, Mesh2D};
pub use solve::{reaction_force, solve_increment, Dirichlet, Increment, NewtonOptions};
