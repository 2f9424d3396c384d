//! Residuals of the identities the evaluation must satisfy.

use crate::bordism::{Bordism, Component, Orientation};
use crate::bundle::PathData;
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, SmoothExpr, Var};

use super::data::Primitives;
use super::eval::{evaluate_with, EvalOptions, EvalResult};

fn eval_one<P: Primitives + ?Sized>(z: &P, c: Component, opts: EvalOptions) -> Result<EvalResult> {
    evaluate_with(z, &Bordism::single(c)?, opts)
}

/// Zig-zag `(id ⊗ R)(L ⊗ id)` with the left elbow on `[a, c]` and the right
/// elbow on `[c, b]`, `c` the midpoint, against the interval traversed from
/// `γ(b)` back to `γ(a)`. Returns the Frobenius residual.
pub fn snake_check<P: Primitives + ?Sized>(z: &P, path: &PathData, a: f64, b: f64) -> Result<f64> {
    snake(z, path, a, b, false)
}

/// Oriented zig-zag; both elbows positively oriented, compared against the
/// negatively oriented interval.
pub fn snake_check_oriented<P: Primitives + ?Sized>(z: &P, path: &PathData, a: f64, b: f64) -> Result<f64> {
    snake(z, path, a, b, true)
}

fn snake<P: Primitives + ?Sized>(z: &P, path: &PathData, a: f64, b: f64, oriented: bool) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Precondition(format!("snake needs a < b, got [{a}, {b}]")));
    }
    let n = z.rank();
    let c = 0.5 * (a + b);
    let (orient, back_orient) = if oriented {
        (Orientation::Positive, Orientation::Negative)
    } else {
        (Orientation::Unoriented, Orientation::Unoriented)
    };
    let opts = EvalOptions {
        oriented,
        ..EvalOptions::default()
    };
    let left = eval_one(
        z,
        Component::left_elbow(path.clone(), a, c)?.with_orientation(orient),
        opts,
    )?;
    let right = eval_one(
        z,
        Component::right_elbow(path.clone(), c, b)?.with_orientation(orient),
        opts,
    )?;
    let id = DenseMatrix::identity(n);
    let zigzag = &id.kron(&right.matrix) * &left.matrix.kron(&id);
    let back = Component::standard(path.reversed(), &[-b, -a])?.with_orientation(back_orient);
    let interval = eval_one(z, back, opts)?;
    Ok(zigzag.distance(&interval.matrix))
}

/// Difference between evaluating `elbow` with the form applied at `m1` and at
/// `m2` (absolute parameter values inside the elbow's core).
pub fn elbow_midpoint_invariance<P: Primitives + ?Sized>(z: &P, elbow: &Component, m1: f64, m2: f64) -> Result<f64> {
    let at = |m: f64| {
        eval_one(
            z,
            elbow.clone(),
            EvalOptions {
                elbow_at: Some(m),
                ..EvalOptions::default()
            },
        )
    };
    Ok(at(m1)?.matrix.distance(&at(m2)?.matrix))
}

/// The flip `V ⊗ V → V ⊗ V`.
pub fn swap_matrix(n: usize) -> DenseMatrix {
    DenseMatrix::tensor_permutation(n, &[1, 0])
}

/// An elbow on `[a, b]` traversed the other way: `γ` replaced by
/// `t ↦ γ(a + b − t)`. The cut functions are symmetric about the midpoint
/// and stay unchanged.
pub fn swap_elbow(elbow: &Component, a: f64, b: f64) -> Result<Component> {
    let flip = SmoothExpr::constant(a + b) - SmoothExpr::var(Var::T);
    Ok(Component {
        path: elbow.path.substitute_time(&flip)?,
        ..elbow.clone()
    })
}
