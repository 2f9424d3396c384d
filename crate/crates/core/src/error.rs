use thiserror::Error;

use crate::numerics::Var;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable `{0}` is not assigned")]
    Unassigned(Var),

    #[error("division by zero in subexpression `{subtree}`")]
    DivisionByZero { subtree: String },

    #[error("non-finite value in subexpression `{subtree}`")]
    NonFinite { subtree: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (|det| = {det:e}, condition estimate {condition:e})")]
    Singular { det: f64, condition: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("bilinear form is degenerate (|det| = {det:e}); nondegeneracy is required")]
    Degenerate { det: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("point {point:?} at t = {t} leaves the domain box")]
    OutOfDomain { t: f64, point: Vec<f64> },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("oracle query failed: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
