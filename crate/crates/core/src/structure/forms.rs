//! Exact laws of linear and quadratic forms in independent entries.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{Elem, Field, FqMatrix};
use crate::error::{Error, Result};
use crate::models::EntryDist;

/// Slack added to the passing side of every inequality check.
pub const SLACK: f64 = 1e-12;

/// Largest codimension handled by [`subspace_prob`].
pub const MAX_CODIMENSION: usize = 3;

/// Largest outcome count enumerated by [`quad_form_pmf`].
pub const MAX_ENUMERATION: u64 = 1_000_000;

/// Largest variable count enumerated by [`quad_form_pmf`].
pub const MAX_QUAD_VARS: usize = 8;

/// Law of one coordinate: its distribution, or a fixed value for type-F positions.
fn coordinate_law(i: usize, dists: &[EntryDist], fixed: &BTreeMap<usize, Elem>) -> Vec<(Elem, u64)> {
    match fixed.get(&i) {
        Some(&v) => vec![(v, 1)],
        None => dists[i].support().map(|k| (k, dists[i].weights()[k as usize])).collect(),
    }
}

fn to_rationals(weights: Vec<BigInt>) -> Vec<BigRational> {
    let total: BigInt = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| BigRational::new(w, total.clone()))
        .collect()
}

/// Exact law of `X . a` over F_q, indexed by value.
pub fn linear_form_pmf(
    f: &Field,
    a: &[Elem],
    dists: &[EntryDist],
    fixed: &BTreeMap<usize, Elem>,
) -> Vec<BigRational> {
    assert_eq!(a.len(), dists.len(), "one law per coordinate");
    let q = f.q() as usize;
    let mut law = vec![BigInt::zero(); q];
    law[0] = BigInt::one();
    for (i, &ai) in a.iter().enumerate() {
        let step = coordinate_law(i, dists, fixed);
        let mut next = vec![BigInt::zero(); q];
        for (r, w) in law.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for &(x, c) in &step {
                next[f.add(r as Elem, f.mul(ai, x)) as usize] += w * c;
            }
        }
        law = next;
    }
    to_rationals(law)
}

/// Basis of `H^perp` for `H` spanned by `basis` in F_q^n.
fn annihilator(f: &Field, n: usize, basis: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    if basis.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch(format!("basis vectors must have length {n}")));
    }
    if basis.is_empty() {
        return Ok((0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect());
    }
    let m = FqMatrix::from_rows(basis)?;
    if m.rank(f) != basis.len() {
        return Err(Error::InvalidSpec("basis vectors are linearly dependent".into()));
    }
    Ok(m.right_nullspace(f))
}

/// Exact `P(X in H)` for `H` spanned by `basis`, through the joint law of
/// `(X . w_1, ..., X . w_d)` for a basis `w` of `H^perp`.
pub fn subspace_prob(
    f: &Field,
    basis: &[Vec<Elem>],
    dists: &[EntryDist],
    fixed: &BTreeMap<usize, Elem>,
) -> Result<BigRational> {
    let n = dists.len();
    let perp = annihilator(f, n, basis)?;
    let d = perp.len();
    if d > MAX_CODIMENSION {
        return Err(Error::CodimensionTooLarge(d));
    }
    let q = f.q() as usize;
    let states = q.pow(d as u32);
    let mut law = vec![BigInt::zero(); states];
    law[0] = BigInt::one();
    for i in 0..n {
        let step = coordinate_law(i, dists, fixed);
        let mut next = vec![BigInt::zero(); states];
        for (s, w) in law.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for &(x, c) in &step {
                let mut rest = s;
                let mut t = 0;
                let mut place = 1;
                for w_j in &perp {
                    let digit = (rest % q) as Elem;
                    rest /= q;
                    t += f.add(digit, f.mul(w_j[i], x)) as usize * place;
                    place *= q;
                }
                next[t] += w * c;
            }
        }
        law = next;
    }
    Ok(to_rationals(law).swap_remove(0))
}

/// Outcome of comparing `P(X in H)` with `q^{-d}`.
#[derive(Debug, Clone, Serialize)]
pub struct UnconcCheck {
    pub codimension: usize,
    /// `|P(X in H) - q^{-d}|`.
    pub lhs: f64,
    /// `max_{w in H^perp, w != 0} |P(X . w = 0) - 1/q|`.
    pub delta: f64,
    pub pass: bool,
}

/// Check `|P(X in H) - q^{-d}| <= 2 delta` exactly on one instance.
pub fn check_unconc_implies_uniform(
    f: &Field,
    basis: &[Vec<Elem>],
    dists: &[EntryDist],
    fixed: &BTreeMap<usize, Elem>,
) -> Result<UnconcCheck> {
    let n = dists.len();
    let perp = annihilator(f, n, basis)?;
    let d = perp.len();
    let p_h = subspace_prob(f, basis, dists, fixed)?;
    let q = f.q();
    let uniform = BigRational::new(BigInt::one(), BigInt::from(q).pow(d as u32));
    let lhs = (p_h - uniform).abs();
    let inv_q = BigRational::new(BigInt::one(), BigInt::from(q));
    let mut delta = BigRational::zero();
    // every nonzero combination of the annihilator basis
    for code in 1..(q as usize).pow(d as u32) {
        let mut w = vec![0; n];
        let mut rest = code;
        for w_j in &perp {
            let c = (rest % q as usize) as Elem;
            rest /= q as usize;
            for (wi, &bj) in w.iter_mut().zip(w_j) {
                *wi = f.add(*wi, f.mul(c, bj));
            }
        }
        let at_zero = linear_form_pmf(f, &w, dists, fixed).swap_remove(0);
        let dev = (at_zero - &inv_q).abs();
        if dev > delta {
            delta = dev;
        }
    }
    let lhs = lhs.to_f64().unwrap_or(f64::NAN);
    let delta = delta.to_f64().unwrap_or(f64::NAN);
    Ok(UnconcCheck {
        codimension: d,
        lhs,
        delta,
        pass: lhs <= 2.0 * delta + SLACK,
    })
}

/// Exact law of `sum_{i,j} b_ij x_i x_j + sum_i linear_i x_i` (sum over
/// ordered pairs) by weighted enumeration.
pub fn quad_form_pmf(
    f: &Field,
    b: &FqMatrix,
    linear: &[Elem],
    dists: &[EntryDist],
    fixed: &BTreeMap<usize, Elem>,
) -> Result<Vec<BigRational>> {
    let m = dists.len();
    if b.rows() != m || b.cols() != m || linear.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} form and {} linear terms for {m} variables",
            b.rows(),
            b.cols(),
            linear.len()
        )));
    }
    let laws: Vec<Vec<(Elem, u64)>> = (0..m).map(|i| coordinate_law(i, dists, fixed)).collect();
    let outcomes = laws
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64))
        .unwrap_or(u64::MAX);
    if m > MAX_QUAD_VARS || outcomes > MAX_ENUMERATION {
        return Err(Error::TooLargeToEnumerate(format!(
            "{m} variables with {outcomes} outcomes"
        )));
    }
    let mut law = vec![BigInt::zero(); f.q() as usize];
    let mut xs = Vec::with_capacity(m);
    enumerate_quad(f, b, linear, &laws, &mut xs, 0, &BigInt::one(), &mut law);
    Ok(to_rationals(law))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_quad(
    f: &Field,
    b: &FqMatrix,
    linear: &[Elem],
    laws: &[Vec<(Elem, u64)>],
    xs: &mut Vec<Elem>,
    value: Elem,
    weight: &BigInt,
    out: &mut [BigInt],
) {
    let k = xs.len();
    if k == laws.len() {
        out[value as usize] += weight;
        return;
    }
    for &(x, c) in &laws[k] {
        // terms of the form that involve x_k and earlier variables only
        let mut coef = f.add(linear[k], f.mul(b.get(k, k), x));
        for (i, &xi) in xs.iter().enumerate() {
            coef = f.add(coef, f.mul(f.add(b.get(i, k), b.get(k, i)), xi));
        }
        let v = f.add(value, f.mul(coef, x));
        xs.push(x);
        enumerate_quad(f, b, linear, laws, xs, v, &(weight * c), out);
        xs.pop();
    }
}

/// Outcome of one decoupling comparison.
#[derive(Debug, Clone, Serialize)]
pub struct DecouplingCheck {
    /// `sup_r |P(Q(x) = r) - 1/q|^4`.
    pub lhs4: f64,
    /// `|P(sum_{i in I, j not in I} a_ij y_i y_j = 0) - 1/q|` with `y = x - x'`.
    pub rhs: f64,
    pub pass: bool,
}

/// Compare both sides of the decoupling inequality for a symmetric `a`.
pub fn check_decoupling(
    f: &Field,
    a: &FqMatrix,
    b: &[Elem],
    dists: &[EntryDist],
    i_set: &BTreeSet<usize>,
) -> Result<DecouplingCheck> {
    if !a.is_symmetric() {
        return Err(Error::InvalidSpec("decoupling needs a symmetric matrix".into()));
    }
    let none = BTreeMap::new();
    let q = f.q();
    let inv_q = BigRational::new(BigInt::one(), BigInt::from(q));
    let law = quad_form_pmf(f, a, b, dists, &none)?;
    let sup = law
        .iter()
        .map(|p| (p - &inv_q).abs())
        .max()
        .expect("q >= 2 values");
    let m = dists.len();
    let mut cross = FqMatrix::zeros(m, m);
    for &i in i_set {
        for j in (0..m).filter(|j| !i_set.contains(j)) {
            cross.set(i, j, a.get(i, j));
        }
    }
    let ys = dists
        .iter()
        .map(|d| d.difference(f))
        .collect::<Result<Vec<_>>>()?;
    let y_law = quad_form_pmf(f, &cross, &vec![0; m], &ys, &none)?;
    let rhs = (&y_law[0] - &inv_q).abs();
    let lhs4 = sup.pow(4).to_f64().unwrap_or(f64::NAN);
    let rhs = rhs.to_f64().unwrap_or(f64::NAN);
    Ok(DecouplingCheck {
        lhs4,
        rhs,
        pass: lhs4 <= rhs + SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn linear_form_trivial_cases() {
        let f = field(5);
        let u = vec![EntryDist::uniform(5); 3];
        let none = BTreeMap::new();
        assert!(linear_form_pmf(&f, &[1, 0, 0], &u, &none).iter().all(|p| *p == r(1, 5)));
        let fixed: BTreeMap<usize, Elem> = [(1, 3)].into();
        let law = linear_form_pmf(&f, &[0, 2, 0], &u, &fixed);
        // 2 * 3 = 1 in F_5
        assert_eq!(law[1], r(1, 1));
    }

    #[test]
    fn subspace_trivial_cases() {
        let f = field(3);
        let u = vec![EntryDist::uniform(3); 3];
        let none = BTreeMap::new();
        let full = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(subspace_prob(&f, &full, &u, &none).unwrap(), r(1, 1));
        let h = vec![vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(subspace_prob(&f, &h, &u, &none).unwrap(), r(1, 3));
        let u6 = vec![EntryDist::uniform(3); 6];
        assert_eq!(
            subspace_prob(&f, &[vec![1, 0, 0, 0, 0, 0]], &u6, &none).unwrap_err(),
            Error::CodimensionTooLarge(5)
        );
        let dependent = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert!(subspace_prob(&f, &dependent, &u, &none).is_err());
    }

    #[test]
    fn unconc_boundary_case() {
        let f = field(5);
        let c0 = vec![EntryDist::constant(5, 0); 2];
        let check = check_unconc_implies_uniform(&f, &[vec![0, 1]], &c0, &BTreeMap::new()).unwrap();
        assert!((check.lhs - 0.8).abs() < 1e-12);
        assert!((check.delta - 0.8).abs() < 1e-12);
        assert!(check.pass);
        let u = vec![EntryDist::uniform(5); 2];
        let check = check_unconc_implies_uniform(&f, &[vec![1, 1]], &u, &BTreeMap::new()).unwrap();
        assert_eq!(check.lhs, 0.0);
    }

    #[test]
    fn quad_form_examples() {
        let f = field(3);
        let none = BTreeMap::new();
        let one = FqMatrix::from_rows(&[vec![1]]).unwrap();
        let law = quad_form_pmf(&f, &one, &[0], &[EntryDist::uniform(3)], &none).unwrap();
        assert_eq!(law, vec![r(1, 3), r(2, 3), r(0, 1)]);
        let zero = FqMatrix::zeros(2, 2);
        let u = vec![EntryDist::uniform(3); 2];
        let law = quad_form_pmf(&f, &zero, &[1, 0], &u, &none).unwrap();
        assert!(law.iter().all(|p| *p == r(1, 3)));
        let big = vec![EntryDist::uniform(3); 9];
        assert!(quad_form_pmf(&f, &FqMatrix::zeros(9, 9), &[0; 9], &big, &none).is_err());
    }

    #[test]
    fn decoupling_cross_term_example() {
        let q = 5;
        let f = field(q);
        let a = FqMatrix::from_rows(&[vec![0, 2], vec![2, 0]]).unwrap();
        let u = vec![EntryDist::uniform(5); 2];
        let check = check_decoupling(&f, &a, &[0, 0], &u, &[0].into()).unwrap();
        let expect = (q as f64 - 1.0) / (q * q) as f64;
        assert!((check.rhs - expect).abs() < 1e-12);
        assert!(check.pass);
        let zero = FqMatrix::zeros(2, 2);
        let check = check_decoupling(&f, &zero, &[1, 3], &u, &[0].into()).unwrap();
        assert_eq!(check.lhs4, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn decoupling_fails_in_characteristic_two() {
        // over F_4 the cross terms of a symmetric form cancel, so the form is
        // constant while the decoupled side stays nearly balanced
        let f = field(4);
        let a = FqMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let u = vec![EntryDist::uniform(4); 2];
        let check = check_decoupling(&f, &a, &[0, 0], &u, &[0].into()).unwrap();
        assert!((check.lhs4 - (0.75f64).powi(4)).abs() < 1e-12);
        assert!((check.rhs - 3.0 / 16.0).abs() < 1e-12);
        assert!(!check.pass);
    }
}
