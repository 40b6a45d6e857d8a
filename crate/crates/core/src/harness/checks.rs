use std::collections::HashMap;
use std::str::FromStr;
use std::time::Instant;

use bigdecimal::{BigDecimal, ToPrimitive};
use num_bigint::BigInt;
use num_traits::Pow;
use rand::Rng;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::mc::{parallel_counts, z99};
use super::report::VerificationReport;
use crate::algebra::{Elem, Field, FqMatrix, SpanBasis};
use crate::distributions::{tv_distance, Ensemble, Parity};
use crate::error::Result;
use crate::models::{sample_gl, trial_rng, EntryDist};

/// Tolerance requested from the limit laws in sandwich checks.
pub const SANDWICH_TOL: f64 = 1e-24;

/// Precision of the sandwich comparison.
pub const SANDWICH_PRECISION: &str = "1e-20";

const ODLYZKO_DOMAIN: u64 = 0x6f64_6c79;

/// Published constants `(lower, upper, exponent)`: the distance lies in
/// `[lower / q^exponent, upper / q^exponent]`.
pub fn sandwich_constants(ensemble: Ensemble, n: usize) -> (&'static str, &'static str, usize) {
    let even = n.is_multiple_of(2);
    match ensemble {
        Ensemble::Square => ("0.125", "3", n + 1),
        Ensemble::Rect(m) => ("0.125", "3", n + m + 1),
        Ensemble::Symmetric if even => ("0.18", "2.25", n + 1),
        Ensemble::Symmetric => ("0.18", "2", n + 2),
        Ensemble::Alternating if even => ("0.18", "1.5", n + 1),
        Ensemble::Alternating => ("0.37", "2.2", n + 1),
    }
}

/// Check that the distance between the size-n law and its limit lies in the
/// published interval.
pub fn fg_sandwich_check(ensemble: Ensemble, n: usize, f: &Field) -> Result<VerificationReport> {
    let start = Instant::now();
    let finite = ensemble.finite_pmf(n, f)?;
    let limit = ensemble.limit_pmf(f, Parity::of(n), SANDWICH_TOL)?;
    let tv = tv_distance(&finite, &limit);
    let (lo, hi, e) = sandwich_constants(ensemble, n);
    let scale = BigDecimal::from(Pow::pow(BigInt::from(f.q()), e as u64));
    let lower = BigDecimal::from_str(lo).expect("constant") / &scale;
    let upper = BigDecimal::from_str(hi).expect("constant") / &scale;
    let precision = BigDecimal::from_str(SANDWICH_PRECISION).expect("constant");
    let pass = tv.error <= precision && tv.value >= &lower - &precision && tv.value <= &upper + &precision;
    Ok(VerificationReport::new(
        format!("sandwich {ensemble} n={n} q={}", f.q()),
        json!({
            "tv": tv.value.round(30).to_string(),
            "tv_error": tv.error.to_f64(),
            "tv_times_q_pow": (&tv.value * &scale).round(12).to_string(),
        }),
        json!({ "lower": lower.round(30).to_string(), "upper": upper.round(30).to_string() }),
        pass,
    )
    .with_runtime(start.elapsed().as_secs_f64()))
}

/// One-sided slack for comparing a frequency against probability `b`.
fn slack(b: f64, trials: u64) -> f64 {
    let b = b.clamp(0.0, 1.0);
    z99() * (b * (1.0 - b) / trials as f64).sqrt()
}

/// Random full-rank d x n matrix from `rng`.
fn random_full_rank<R: Rng>(f: &Field, d: usize, n: usize, rng: &mut R) -> Vec<Vec<Elem>> {
    let mut basis = SpanBasis::new(n);
    let mut rows = Vec::with_capacity(d);
    while rows.len() < d {
        let v: Vec<Elem> = (0..n).map(|_| rng.random_range(0..f.q())).collect();
        if basis.insert(&v, f) {
            rows.push(v);
        }
    }
    rows
}

/// Empirical `P(X in V)` for a fresh random codimension-d subspace `V` per
/// trial, with the first `k_bad` coordinates of X fixed at 0, against
/// `(C/q)^{d - k_bad}`.
pub fn odlyzko_check(
    f: &Field,
    n: usize,
    d: usize,
    k_bad: usize,
    dist: &EntryDist,
    trials: u64,
    seed: u64,
) -> VerificationReport {
    assert!(d <= n && k_bad <= n, "need d, k_bad <= n");
    let start = Instant::now();
    let counts = parallel_counts(trials, 2, |t| {
        let mut rng = trial_rng(seed, t, ODLYZKO_DOMAIN);
        let w = random_full_rank(f, d, n, &mut rng);
        let x: Vec<Elem> = (0..n)
            .map(|i| if i < k_bad { 0 } else { dist.sample(&mut rng) })
            .collect();
        usize::from(w.iter().all(|row| f.dot(row, &x) == 0))
    });
    let freq = counts[1] as f64 / trials as f64;
    let c = dist.near_uniform_constant();
    let bound = (c / f64::from(f.q())).powi(d as i32 - k_bad as i32);
    let pass = bound >= 1.0 || freq <= bound + slack(bound, trials);
    VerificationReport::new(
        format!("subspace containment n={n} d={d} k={k_bad} q={}", f.q()),
        json!({ "frequency": freq, "trials": trials, "seed": seed }),
        json!({ "upper": bound, "slack": slack(bound, trials) }),
        pass,
    )
    .with_runtime(start.elapsed().as_secs_f64())
}

/// Frequency with which the first k columns of a uniform GL_n element,
/// restricted to the first l coordinates, are independent, against
/// `1 - 2/q^{l-k}`.
pub fn submatrix_fullrank_check(f: &Field, n: usize, k: usize, l: usize, trials: u64, seed: u64) -> VerificationReport {
    assert!(k <= l && l <= n, "need k <= l <= n");
    let start = Instant::now();
    let counts = parallel_counts(trials, 2, |t| {
        let g = sample_gl(f, n, seed, t);
        usize::from(g.top_left(l, k).rank(f) == k)
    });
    let freq = counts[1] as f64 / trials as f64;
    let bound = 1.0 - 2.0 / f64::from(f.q()).powi((l - k) as i32);
    let pass = bound <= 0.0 || freq >= bound - slack(bound, trials);
    VerificationReport::new(
        format!("GL submatrix independence n={n} k={k} l={l} q={}", f.q()),
        json!({ "frequency": freq, "trials": trials, "seed": seed }),
        json!({ "lower": bound, "slack": slack(bound, trials) }),
        pass,
    )
    .with_runtime(start.elapsed().as_secs_f64())
}

/// Pearson chi-square test of the GL_n sampler against the uniform law on
/// all (q^n - 1)(q^n - q)...(q^n - q^{n-1}) elements; passes when p > 1e-3.
pub fn gl_chi_square(f: &Field, n: usize, trials: u64, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let q = f.q() as usize;
    let cells = n * n;
    let code = |m: &FqMatrix| m.data().iter().fold(0usize, |acc, &v| acc * q + v as usize);
    let mut index: HashMap<usize, usize> = HashMap::new();
    let total = q.pow(cells as u32);
    for c in 0..total {
        let mut rest = c;
        let mut data = vec![0; cells];
        for v in data.iter_mut().rev() {
            *v = (rest % q) as Elem;
            rest /= q;
        }
        let m = FqMatrix::new(n, n, data)?;
        if m.rank(f) == n {
            let len = index.len();
            index.insert(c, len);
        }
    }
    let groups = index.len();
    // one extra bin catches anything outside GL_n
    let counts = parallel_counts(trials, groups + 1, |t| {
        let g = sample_gl(f, n, seed, t);
        index.get(&code(&g)).copied().unwrap_or(groups)
    });
    let expected = trials as f64 / groups as f64;
    let stat: f64 = counts[..groups].iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = ChiSquared::new((groups - 1) as f64).expect("df > 0").sf(stat);
    Ok(VerificationReport::new(
        format!("GL_{n}(F_{}) uniformity", f.q()),
        json!({ "cells": groups, "chi_square": stat, "p_value": p_value, "outside_gl": counts[groups], "trials": trials, "seed": seed }),
        json!({ "min_p_value": 1e-3 }),
        counts[groups] == 0 && p_value > 1e-3,
    )
    .with_runtime(start.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn sandwich_examples() {
        assert!(fg_sandwich_check(Ensemble::Square, 6, &field(2)).unwrap().pass);
        assert!(fg_sandwich_check(Ensemble::Symmetric, 5, &field(3)).unwrap().pass);
        assert!(fg_sandwich_check(Ensemble::Alternating, 6, &field(3)).unwrap().pass);
    }

    #[test]
    fn odlyzko_examples() {
        let f = field(5);
        let u = EntryDist::uniform(5);
        assert!(odlyzko_check(&f, 4, 0, 0, &u, 50, 1).pass);
        assert!(odlyzko_check(&f, 6, 3, 0, &u, 4000, 1).pass);
    }

    #[test]
    fn submatrix_examples() {
        let f = field(3);
        let full = submatrix_fullrank_check(&f, 5, 5, 5, 200, 2);
        assert_eq!(full.computed["frequency"], 1.0);
        assert!(full.pass);
        assert!(submatrix_fullrank_check(&f, 6, 2, 2, 100, 2).pass);
    }

    #[test]
    fn chi_square_gl2_f2() {
        let r = gl_chi_square(&field(2), 2, 6000, 5).unwrap();
        assert_eq!(r.computed["cells"], 6);
        assert!(r.pass, "{:?}", r);
    }
}
