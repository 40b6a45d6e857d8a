//! Monte Carlo estimation, enumeration oracles and verification suites.

mod checks;
mod enumerate;
mod mc;
mod report;
pub mod suites;

pub use checks::{
    fg_sandwich_check, gl_chi_square, odlyzko_check, sandwich_constants, submatrix_fullrank_check,
    SANDWICH_PRECISION, SANDWICH_TOL,
};
pub use enumerate::{brute_force_pmf, count_full_rank_symmetric, zero_diag_count_check, MAX_OUTCOMES};
pub use mc::{mc_corank, mc_corank_serial, parallel_counts, tv_report, worker_count, z99, MCResult, THREADS_ENV};
pub use report::VerificationReport;
