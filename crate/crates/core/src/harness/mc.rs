use std::sync::OnceLock;

use bigdecimal::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;
use statrs::distribution::{ContinuousCDF, Normal};

use super::report::VerificationReport;
use crate::distributions::{tv_distance, CorankPmf};
use crate::error::Result;
use crate::models::{sample_corank, ModelSpec};

/// Environment variable capping the number of Monte Carlo workers.
pub const THREADS_ENV: &str = "FQRANK_THREADS";

const CHUNK: u64 = 64;

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().expect("thread pool")
    })
}

/// Number of Monte Carlo workers.
pub fn worker_count() -> usize {
    pool().current_num_threads()
}

/// Two-sided 99% normal quantile.
pub fn z99() -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.995)
}

/// Histogram of `outcome(trial)` over `trials` trials on the worker pool.
///
/// Each trial is keyed by its index, so counts do not depend on scheduling.
pub fn parallel_counts<F>(trials: u64, bins: usize, outcome: F) -> Vec<u64>
where
    F: Fn(u64) -> usize + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    pool().install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut counts = vec![0u64; bins];
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    counts[outcome(t)] += 1;
                }
                counts
            })
            .reduce(
                || vec![0u64; bins],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    })
}

#[derive(Debug, Clone)]
pub struct MCResult {
    pub empirical: CorankPmf,
    pub counts: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    /// 99% binomial half-widths per corank.
    pub ci_half_widths: Vec<f64>,
}

impl MCResult {
    fn from_counts(q: u32, counts: Vec<u64>, seed: u64) -> Self {
        let trials: u64 = counts.iter().sum();
        let z = z99();
        let ci_half_widths = counts
            .iter()
            .map(|&c| {
                let p = c as f64 / trials as f64;
                z * (p * (1.0 - p) / trials as f64).sqrt()
            })
            .collect();
        Self {
            empirical: CorankPmf::empirical(q, &counts).with_param("trials", trials).with_param("seed", seed),
            counts,
            trials,
            seed,
            ci_half_widths,
        }
    }

    /// Half the summed half-widths: the scale of TV expected from noise alone.
    pub fn noise_floor(&self) -> f64 {
        self.ci_half_widths.iter().sum::<f64>() / 2.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "trials": self.trials,
            "seed": self.seed,
            "counts": self.counts,
            "ci_half_widths": self.ci_half_widths,
            "empirical": self.empirical.to_json(),
        })
    }
}

/// Empirical corank law from `trials` samples of `spec`.
pub fn mc_corank(spec: &ModelSpec, trials: u64, seed: u64) -> Result<MCResult> {
    spec.validate()?;
    assert!(trials >= 1, "need at least one trial");
    let bins = spec.shape().0 + 1;
    let counts = parallel_counts(trials, bins, |t| sample_corank(spec, seed, t));
    Ok(MCResult::from_counts(spec.field.q(), counts, seed))
}

/// The same estimate computed on the calling thread.
pub fn mc_corank_serial(spec: &ModelSpec, trials: u64, seed: u64) -> Result<MCResult> {
    spec.validate()?;
    let mut counts = vec![0u64; spec.shape().0 + 1];
    for t in 0..trials {
        counts[sample_corank(spec, seed, t)] += 1;
    }
    Ok(MCResult::from_counts(spec.field.q(), counts, seed))
}

/// Total variation between an empirical law and a reference, passing when
/// the upper end of the distance is at most `tolerance`.
pub fn tv_report(claim: &str, result: &MCResult, reference: &CorankPmf, tolerance: f64) -> VerificationReport {
    let tv = tv_distance(&result.empirical, reference);
    let upper = tv.upper().to_f64().unwrap_or(f64::NAN);
    VerificationReport::new(
        claim,
        json!({
            "tv": tv.to_f64(),
            "tv_error": tv.error.to_f64(),
            "noise_floor": result.noise_floor(),
            "trials": result.trials,
            "seed": result.seed,
        }),
        json!({ "tolerance": tolerance }),
        upper <= tolerance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::models::ModelKind;

    #[test]
    fn parallel_matches_serial() {
        let f = Field::new(3).unwrap();
        let spec = ModelSpec::uniform(ModelKind::Symmetric, &f, 5);
        let a = mc_corank(&spec, 500, 17).unwrap();
        let b = mc_corank_serial(&spec, 500, 17).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.iter().sum::<u64>(), 500);
    }

    #[test]
    fn gl_minus_identity_one_by_one() {
        let f = Field::new(2).unwrap();
        let spec = ModelSpec::uniform(ModelKind::GlMinusIdentity, &f, 1);
        let r = mc_corank(&spec, 50, 0).unwrap();
        assert_eq!(r.counts, vec![0, 50]);
    }

    #[test]
    fn z_quantile() {
        assert!((z99() - 2.5758).abs() < 1e-3);
    }
}
