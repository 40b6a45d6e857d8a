//! Random matrix ensembles and their seeded samplers.

mod entry;
mod sampler;
mod spec;

pub use entry::EntryDist;
pub use sampler::{sample, sample_corank, sample_gl, trial_rng};
pub use spec::{validate_conditions, ConditionReport, EntryLaw, ModelKind, ModelSpec, TypeFSpec};
