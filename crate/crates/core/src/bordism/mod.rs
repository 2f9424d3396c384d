//! Bordisms with cut functions: components, cores, simplicial structure,
//! modification functions and families.
//!
//! A component is a path `γ` on a parameter window together with cut
//! functions `ρ_0 ≥ … ≥ ρ_n`. The core `X_a^c = {ρ_a ≥ 0 ≥ ρ_c}` is what
//! the field theory sees; zeros of `ρ_a` are the boundary points at level
//! `a`.

pub mod component;
pub mod cut;
pub mod glue;
pub mod modification;

pub use crate::bundle::cut_rescale;
pub use component::{
    core_intervals, point_signs, simplicial_map, Bordism, Component, CoreInterval, Family, Orientation, PointSign,
};
pub use cut::{CutFamily, Piece, Window};
pub use glue::{glue_family, Overlap};
pub use modification::{
    build_modification, insert_sitting_instants, insert_sitting_instants_with, standard_bump, standard_two_sided,
    ModificationFn, ModificationKind,
};
