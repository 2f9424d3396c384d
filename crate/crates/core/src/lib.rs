//! Numerical one-dimensional geometric field theories.
//!
//! A field theory here is determined by a vector bundle with connection and a
//! compatible symmetric bilinear form over a box `M ⊆ ℝ^m`. The crate
//! evaluates bordisms (intervals, elbows, circles and parameter families of
//! them) to matrices by parallel transport, and runs the converse: rebuilding
//! the bundle data from a black-box theory that can only be queried.
//!
//! Module map:
//!
//! * [`numerics`]: expression language, matrices, ODE integration.
//! * [`bundle`]: bundles, paths, transport, holonomy, compatibility.
//! * [`bordism`]: cut functions, cores, modification functions, families.
//! * [`tft`]: the forward evaluation functor.
//! * [`classify`]: oracles and reconstruction.
//! * [`verify`]: the property suites backing the acceptance checks.

pub mod bordism;
pub mod bundle;
pub mod classify;
pub mod error;
pub mod numerics;
pub mod tft;
pub mod verify;

pub use error::{Error, Result};
