//! Corank laws: exact finite-n formulas, limiting laws and total variation.

mod ensemble;
mod finite;
mod limits;
mod pmf;

pub use ensemble::Ensemble;
pub use finite::{uniform_alt_pmf, uniform_rect_pmf, uniform_square_pmf, uniform_sym_pmf};
pub use limits::{limit_alt_pmf, limit_rect_pmf, limit_square_pmf, limit_sym_pmf, Parity, PRODUCT_CUTOFF};
pub use pmf::{rational_to_decimal, tv_distance, CorankPmf, Mass, PmfKind, TvDistance, DECIMAL_DIGITS};
