//! Fourier structure of vectors and exact anti-concentration of forms.
//!
//! For entry laws `c^i` the transform `f_i(t) = |sum_k c^i_k e(k t)|` with
//! `e(x) = exp(2 pi i tr(x) / p)` controls how far `X . a` is from uniform:
//! `|P(X . a = r) - 1/q| <= rho_F(a)`.

mod forms;
mod fourier;

pub use forms::{
    check_decoupling, check_unconc_implies_uniform, linear_form_pmf, quad_form_pmf, subspace_prob,
    DecouplingCheck, UnconcCheck, MAX_CODIMENSION, MAX_ENUMERATION, MAX_QUAD_VARS, SLACK,
};
pub use fourier::{
    counting_bound, f_abs, f_table, parseval_sum, rho, structure_report, threshold_bound, threshold_set,
    StructureReport,
};
