//! Adaptive free-form deformation (FFD) parameterization for shape optimization.
//!
//! * [`bernstein`]: binomials, Bernstein bases and 2D Bezier curves.
//! * [`inverse2d`]: the Bezier shape-inverse problem, its conditioning, Tikhonov
//!   regularization and support adaption by total-variation minimization.
//! * [`ffd`]: trivariate Bezier lattices, mesh embedding, design-vector mapping and
//!   re-baselining of the control volume.
//! * [`optimizer`]: Nelder-Mead and the adaption-scheduled optimization driver.
//! * [`objectives`]: penalized aerodynamic cost and geometric surface-fit objectives.
//! * [`wing`]: a parametric wing surface and seeded surface-fit targets.

pub mod bernstein;
pub mod error;
pub mod ffd;
pub mod inverse2d;
pub mod linalg;
pub mod objectives;
pub mod optimizer;
pub mod par;
pub mod quadrature;
pub mod wing;

pub use error::{Error, Result};
