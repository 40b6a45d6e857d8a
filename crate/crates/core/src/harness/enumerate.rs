//! Exact oracles by enumerating every outcome.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use super::report::VerificationReport;
use crate::algebra::{Elem, Field, FqMatrix};
use crate::distributions::CorankPmf;
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

/// Largest number of outcomes any oracle enumerates.
pub const MAX_OUTCOMES: u64 = 10_000_000;

/// A free entry: the positions it fills and the value it puts in each.
struct Slot {
    positions: Vec<(usize, usize, bool)>,
    law: Vec<(Elem, u64)>,
}

fn guard(sizes: impl Iterator<Item = usize>) -> Result<u64> {
    let mut total = 1u64;
    for s in sizes {
        total = total.saturating_mul(s as u64);
        if total > MAX_OUTCOMES {
            return Err(Error::TooLargeToEnumerate(format!("more than {MAX_OUTCOMES} outcomes")));
        }
    }
    Ok(total)
}

/// Exact corank law of `spec` by weighted enumeration of all free entries.
///
/// Type-F entries and planted corners are held fixed; the GL kinds enumerate
/// all n x n matrices and keep the invertible ones.
pub fn brute_force_pmf(spec: &ModelSpec) -> Result<CorankPmf> {
    spec.validate()?;
    let f = &spec.field;
    if spec.kind.is_gl() {
        return gl_brute_force(spec);
    }
    let (rows, cols) = spec.shape();
    let mut base = FqMatrix::zeros(rows, cols);
    let mut slots = Vec::new();
    let structured = spec.kind.is_symmetric_class() || spec.kind.is_alternating_class();
    let alternating = spec.kind.is_alternating_class();
    let corner = spec.planted.as_ref().map_or(0, FqMatrix::rows);
    for j in 0..cols {
        for i in 0..rows {
            if structured && i > j {
                continue;
            }
            if alternating && i == j {
                continue;
            }
            let mirror = structured && i != j;
            if let Some(p) = spec.planted.as_ref().filter(|_| j < corner) {
                base.set(i, j, p.get(i, j));
                if mirror {
                    base.set(j, i, p.get(j, i));
                }
                continue;
            }
            if let Some(v) = spec.type_f.fixed(i, j) {
                base.set(i, j, v);
                if mirror {
                    base.set(j, i, if alternating { f.neg(v) } else { v });
                }
                continue;
            }
            let d = spec.entries.at(i, j);
            let mut positions = vec![(i, j, false)];
            if mirror {
                positions.push((j, i, alternating));
            }
            slots.push(Slot {
                positions,
                law: d.support().map(|k| (k, d.weights()[k as usize])).collect(),
            });
        }
    }
    guard(slots.iter().map(|s| s.law.len()))?;
    let mut weights: BTreeMap<usize, BigInt> = BTreeMap::new();
    let mut m = base;
    let mut digits = vec![0usize; slots.len()];
    loop {
        let mut w = BigInt::from(1);
        for (slot, &d) in slots.iter().zip(&digits) {
            let (v, c) = slot.law[d];
            w *= c;
            for &(i, j, negate) in &slot.positions {
                m.set(i, j, if negate { f.neg(v) } else { v });
            }
        }
        *weights.entry(m.corank(f)).or_default() += w;
        // odometer increment
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(finish(spec, weights));
            }
            digits[k] += 1;
            if digits[k] < slots[k].law.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn finish(spec: &ModelSpec, weights: BTreeMap<usize, BigInt>) -> CorankPmf {
    let total: BigInt = weights.values().sum();
    let masses = weights
        .into_iter()
        .map(|(k, w)| (k, BigRational::new(w, total.clone())))
        .collect();
    CorankPmf::exact_sparse(spec.field.q(), masses)
        .with_param("model", spec.kind.as_str())
        .with_param("n", spec.n)
        .with_param("source", "enumeration")
}

/// Every matrix with entries in F_q of the given shape, in odometer order.
fn for_each_matrix(f: &Field, rows: usize, cols: usize, mut visit: impl FnMut(&FqMatrix)) -> Result<()> {
    guard(std::iter::repeat_n(f.q() as usize, rows * cols))?;
    let mut m = FqMatrix::zeros(rows, cols);
    let cells = rows * cols;
    let mut data = vec![0 as Elem; cells];
    loop {
        visit(&m);
        let mut k = 0;
        loop {
            if k == cells {
                return Ok(());
            }
            data[k] += 1;
            if data[k] < f.q() {
                m.set(k / cols, k % cols, data[k]);
                break;
            }
            data[k] = 0;
            m.set(k / cols, k % cols, 0);
            k += 1;
        }
    }
}

fn gl_brute_force(spec: &ModelSpec) -> Result<CorankPmf> {
    let f = &spec.field;
    let n = spec.n;
    let mut weights: BTreeMap<usize, BigInt> = BTreeMap::new();
    let identity = FqMatrix::identity(n);
    for_each_matrix(f, n, n, |a| {
        if a.rank(f) != n {
            return;
        }
        let corank = match spec.kind {
            ModelKind::UniformGl => 0,
            ModelKind::GlMinusIdentity => a.sub(&identity, f).expect("same shape").corank(f),
            _ => a.top_left(spec.n_prime, spec.n_prime).corank(f),
        };
        *weights.entry(corank).or_default() += 1;
    })?;
    Ok(finish(spec, weights))
}

/// Number of full-rank symmetric n x n matrices, optionally with zero diagonal.
pub fn count_full_rank_symmetric(n: usize, f: &Field, zero_diagonal: bool) -> Result<u64> {
    if n == 0 {
        return Ok(1);
    }
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..=j).map(move |i| (i, j)))
        .filter(|&(i, j)| !(zero_diagonal && i == j))
        .collect();
    guard(std::iter::repeat_n(f.q() as usize, positions.len()))?;
    let mut m = FqMatrix::zeros(n, n);
    let mut digits = vec![0 as Elem; positions.len()];
    let mut count = 0u64;
    loop {
        if m.rank(f) == n {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(count);
            }
            digits[k] += 1;
            let v = if digits[k] < f.q() { digits[k] } else { 0 };
            let (i, j) = positions[k];
            m.set(i, j, v);
            m.set(j, i, v);
            if digits[k] < f.q() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Compare the number of full-rank symmetric n x n matrices with zero
/// diagonal against the number of full-rank symmetric (n-1) x (n-1) matrices.
pub fn zero_diag_count_check(n: usize, f: &Field) -> Result<VerificationReport> {
    assert!(n >= 1, "n must be positive");
    let start = Instant::now();
    let zero_diag = count_full_rank_symmetric(n, f, true)?;
    let smaller = count_full_rank_symmetric(n - 1, f, false)?;
    Ok(VerificationReport::new(
        format!("zero-diagonal count n={n} q={}", f.q()),
        json!({ "zero_diagonal_full_rank": zero_diag, "symmetric_full_rank_n_minus_1": smaller }),
        json!({ "relation": "equal" }),
        zero_diag == smaller,
    )
    .with_runtime(start.elapsed().as_secs_f64()))
}
