//! Expressions, dense matrices, ODE integration and small numerical kernels.

pub mod chebyshev;
pub mod expr;
pub mod matrix;
pub mod ode;
pub mod orthonormal;
pub mod parse;
pub mod quadrature;
pub mod roots;

pub use chebyshev::ChebyshevGrid;
pub use expr::{Assignment, SmoothExpr, Var};
pub use matrix::{DenseMatrix, INVERTIBILITY_THRESHOLD};
pub use ode::{fundamental_solution, fundamental_solution_with_stats, OdeProblem, OdeStats, DEFAULT_RTOL};
pub use orthonormal::{gram_residual, indefinite_orthonormalize, symmetric_eigen, OrthonormalBasis, Sign};
pub use parse::{parse_expr, ParseError};
