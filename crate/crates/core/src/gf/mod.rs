//! Exact arithmetic over `F_{p^m}` and dense linear algebra.

mod field;
mod matrix;

pub use field::{Fe, Field, FieldSpec, MAX_FIELD_SIZE};
pub(crate) use field::{gcd, is_prime};
pub use matrix::{
    axpy, independent_subset, kernel, rank, rank_kernel_solve, rref, solve, span_basis,
    CoordSolver, Echelon, Matrix, RankKernelSolve, Solution,
};
