//! Finite-field arithmetic and dense linear algebra over F_q.

mod field;
mod matrix;

pub use field::{Elem, Field, MAX_Q};
pub use matrix::{FqMatrix, SpanBasis};
