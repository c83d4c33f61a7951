//! Exact rationals and fraction-free linear algebra.

mod gcd;
mod matrix;
mod rat;

pub use gcd::{gcd, lcm};
pub use matrix::{
    bareiss_echelon, int_kernel, int_kernel_raw, int_rank, kernel, rank, solve, RatMatrix, Solution,
};
pub use rat::{canonical_projective, common_denominator, primitive_integer_vector, primitive_part, Rat, RatParseError};
