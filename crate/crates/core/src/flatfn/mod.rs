//! Functions on `(0, 1]` as expression trees: exact derivative rules,
//! evaluation with derivative jets, seminorms, flatness tests and the
//! transfer to `[1, ∞)` by `x ↦ 1/x`.

pub mod corpus;
mod eval;
mod expr;
mod flatness;
mod grid;
mod schwartz;

pub use eval::{eval, jet, Evaluator};
pub(crate) use eval::binomials;
pub use expr::{FunctionExpr, Node};
pub use flatness::{
    analytic_flatness, is_flat, is_flat_default, is_flat_with, seminorm, seminorm_profile,
    seminorm_profile_with, Flatness, FlatnessReport, SeminormProfile, DEFAULT_FLAT_JMAX,
    DEFAULT_FLAT_NMAX, DEFAULT_FLAT_TOL, FLUSH_TO_ZERO, MONOTONE_WINDOW,
};
pub use grid::{flatness_samples, Grid};
pub use schwartz::{finite_difference, to_schwartz, ExprSource, JetSource, ReciprocalTransform};

/// `j`-th derivative of `f` as an expression.
pub fn deriv(f: &FunctionExpr, j: usize) -> FunctionExpr {
    f.deriv(j)
}
