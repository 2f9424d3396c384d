//! The field theory of a bundle: bordisms to linear maps.
//!
//! Points of a core carry one tensor factor each. Intervals evaluate to
//! transports, right elbows to the form `β` at an interior point pulled back
//! by transports, left elbows to the copairing pushed out by transports,
//! circles to holonomy traces. Disjoint unions become Kronecker products.

pub mod checks;
pub mod data;
pub mod eval;

pub use checks::{elbow_midpoint_invariance, snake_check, snake_check_oriented, swap_elbow, swap_matrix};
pub use data::{Primitives, TftData};
pub use eval::{
    evaluate, evaluate_family, evaluate_oriented, evaluate_with, EvalOptions, EvalResult, FactorKind, FamilyEval,
};
