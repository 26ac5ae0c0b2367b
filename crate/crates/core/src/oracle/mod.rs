//! Independent checks of the closed-form construction.

pub mod mesh_curvature;
pub mod shooting;
pub mod stencil;

pub use mesh_curvature::discrete_mean_curvature;
pub use shooting::{hausdorff, shoot_profile, ShootingOptions, ShootingResult, ShootingSample, Termination};
pub use stencil::{endpoint_flatness, fd_plane_curvature, End};
