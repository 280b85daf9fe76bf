//! Exact arithmetic: rationals, matrices over ℚ, univariate rational
//! functions and sparse multivariate polynomials.

pub mod matrix;
pub mod poly;
pub mod rat;
pub mod unirat;

pub use matrix::QMatrix;
pub use poly::{Monomial, Ring, SparsePoly, Var};
pub use rat::{q, qi, Rat};
pub use unirat::{leading_at_order, projective_limit, UniPoly, UniRat};
