//! Exact computations on the space of complete tetrahedra.
pub mod algebra;
pub mod combinatorics;
pub mod config;
pub mod core;
pub mod relations;
