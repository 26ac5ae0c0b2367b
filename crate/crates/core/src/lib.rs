//! Prescribed mean curvature fields on `ℝ^{n+1}` with the filling property.
//!
//! The construction perturbs the unit circle's polar radius by `ε h`, revolves
//! the resulting profile curve into a hypersurface `S_ε`, and reads off its
//! mean curvature as a function of the distance from the origin. That radial
//! field `H_ε` has a bubble (a rotated copy of `S_ε`) through every point of
//! its ball, and is constant outside it, so translated copies glue into a
//! global field.
//!
//! Modules, bottom-up:
//!
//! - [`perturbation`]: the families of `h` and their exact derivatives
//! - [`profile`]: `γ_ε`, `|γ_ε|` and its inverse, plane curvature
//! - [`surface`]: `S_ε`, principal and mean curvatures, meshes
//! - [`admissibility`]: grid certification of the smallness conditions on `ε`
//! - [`field`]: radial and glued fields, lattices, bubble queries
//! - [`oracle`]: independent checks (stencils, ODE shooting, mesh curvature)
//! - [`io`]: configuration and CSV / OBJ / JSON writers

pub mod admissibility;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
mod jet;
pub mod oracle;
pub mod perturbation;
pub mod profile;
pub mod surface;

pub use admissibility::{certify, interval_estimate, AdmissibilityReport, IntervalEstimate};
pub use error::{Error, Result};
pub use field::{BubbleDescriptor, GlobalField, Normalization, RadialField};
pub use perturbation::PerturbationSpec;
pub use profile::{ProfileCurve, RadiusMap};
pub use surface::{RevolutionSurface, SurfaceMesh};
