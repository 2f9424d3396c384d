//! Trivialized vector bundles with connection and bilinear form over a box
//! in `ℝ^m`: transport, holonomy, coevaluation and compatibility checks.
//!
//! Transport follows `u̇ = −ω(γ̇)u`, i.e. `∇_v u = ∂_v u + ω(v)u` has parallel
//! sections as solutions.

pub mod compat;
pub mod data;
pub mod path;
pub mod random;
pub mod transport;

pub use compat::{check_compatibility, compatibility_residual, CompatibilityReport, COMPATIBILITY_TOLERANCE};
pub use data::{BundleData, DomainBox};
pub use path::{cut_rescale, Affine, ExprReparametrization, PathData, Reparametrization};
pub use transport::{
    coevaluation, holonomy, holonomy_trace, holonomy_with_rtol, parallel_transport, parallel_transport_with_rtol,
    pullback_coefficient,
};
