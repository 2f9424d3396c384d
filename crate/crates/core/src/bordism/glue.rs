//! Gluing two families along an overlap with a partition of unity.

use crate::error::{Error, Result};
use crate::numerics::{Assignment, SmoothExpr, Var};

use super::component::{Bordism, Component, Family};

/// `χ₁ + χ₂ = 1` must hold to this tolerance on every fiber.
pub const PARTITION_TOLERANCE: f64 = 1e-12;

/// Parameter values closer than this are the same fiber.
const SAME_FIBER: f64 = 1e-12;

/// Overlap data: `F(t, s)` expresses the parameter of the second chart in
/// terms of the first, `χ₁(s)`, `χ₂(s)` a partition of unity subordinate to
/// the two parameter ranges.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub transition: SmoothExpr,
    pub chi1: SmoothExpr,
    pub chi2: SmoothExpr,
}

fn eval_s(e: &SmoothExpr, s: f64) -> Result<f64> {
    e.eval(&Assignment::new().with_s(s))
}

/// Glues `f1` over `S₁` and `f2` over `S₂` into a family over `S₁ ∪ S₂`.
///
/// Fibers in both ranges use the first chart with cut functions
/// `χ₁ρ¹_a + χ₂·(ρ²_a ∘ F)`. Fibers in one range only keep that chart, so
/// the partition is consulted on the overlap alone.
pub fn glue_family(f1: &Family, f2: &Family, overlap: &Overlap) -> Result<Family> {
    for e in [&overlap.chi1, &overlap.chi2] {
        if e.variables().iter().any(|v| *v != Var::S) {
            return Err(Error::Precondition(format!(
                "partition function `{e}` may only depend on s"
            )));
        }
    }
    let mut grid: Vec<f64> = f1.parameters().into_iter().chain(f2.parameters()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() <= SAME_FIBER);

    let lookup = |f: &Family, s: f64| {
        f.fibers
            .iter()
            .find(|(x, _)| (x - s).abs() <= SAME_FIBER)
            .map(|(_, b)| b.clone())
    };

    let mut fibers = Vec::with_capacity(grid.len());
    for s in grid {
        let glued = match (lookup(f1, s), lookup(f2, s)) {
            (Some(b1), None) => b1,
            (None, Some(b2)) => b2,
            (Some(b1), Some(b2)) => {
                let c1 = eval_s(&overlap.chi1, s)?;
                let c2 = eval_s(&overlap.chi2, s)?;
                if (c1 + c2 - 1.0).abs() > PARTITION_TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "partition of unity: χ₁ + χ₂ = {} at s = {s}",
                        c1 + c2
                    )));
                }
                if c1 < -PARTITION_TOLERANCE || c2 < -PARTITION_TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "partition of unity: negative weight (χ₁, χ₂) = ({c1}, {c2}) at s = {s}"
                    )));
                }
                if c2 == 0.0 {
                    b1
                } else {
                    glue_fiber(&b1, &b2, overlap, s, c1, c2)?
                }
            }
            (None, None) => unreachable!("grid is the union of both parameter sets"),
        };
        fibers.push((s, glued));
    }
    Ok(Family { fibers })
}

fn glue_fiber(b1: &Bordism, b2: &Bordism, overlap: &Overlap, s: f64, c1: f64, c2: f64) -> Result<Bordism> {
    if b1.components.len() != b2.components.len() || b1.levels() != b2.levels() {
        return Err(Error::Precondition(format!(
            "fibers over s = {s} have different shapes in the two charts"
        )));
    }
    let transition = overlap.transition.bind(Var::S, s);
    let components = b1
        .components
        .iter()
        .zip(&b2.components)
        .map(|(k1, k2)| {
            let cuts = k1
                .cuts
                .iter()
                .zip(&k2.cuts)
                .map(|(r1, r2)| {
                    let pulled = r2.substitute(Var::T, &transition);
                    r1.clone() * c1 + pulled * c2
                })
                .collect();
            Component { cuts, ..k1.clone() }
        })
        .collect();
    let glued = Bordism { components };
    glued.validate()?;
    Ok(glued)
}
