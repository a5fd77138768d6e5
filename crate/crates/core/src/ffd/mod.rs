//! Trivariate Bezier free-form deformation.
//!
//! A lattice is an axis-aligned box with local coordinates `(ξ, η, ζ) ∈ [0,1]³`
//! and a `(n_i+1) × (n_j+1) × (n_k+1)` array of control-point displacements.
//! A point inside the box moves by the tensor-product Bernstein sum of those
//! displacements; points outside never move.

mod dof;
mod lattice;
mod mesh;
pub mod obj;

pub use dof::{Axis, DofMap, FreezeSpec, FrozenPlane, PlaneIndex};
pub use lattice::{deform_point, initial_control_grid, local_coords, FfdLattice, LatticeBounds};
pub use mesh::{
    apply_deformation, apply_deformation_seq, embed_mesh, rebaseline, EmbeddedMesh, Mesh, Rebaselined,
};
#[cfg(feature = "parallel")]
pub use mesh::apply_deformation_par;

pub type Vec3 = [f64; 3];
