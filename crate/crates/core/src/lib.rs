//! A laboratory for rank statistics of random matrices over finite fields.
//!
//! The crate covers four uniform ensembles (independent square and rectangular,
//! symmetric, alternating), their exact finite-n corank laws and limiting laws,
//! seeded samplers for near-uniform and perturbed ensembles, a Fourier toolkit
//! for anti-concentration of linear and quadratic forms, exact Markov chains
//! for the corank exposure processes, and verification suites that tie all of
//! these together.

pub mod algebra;
pub mod chain;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod models;
pub mod structure;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/laws.md")]
    mod laws {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
