use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Elem, Field};
use crate::models::EntryDist;

/// `|sum_k c_k e(k y)|`, the modulus of the character transform of `d` at `y`.
pub fn f_abs(f: &Field, d: &EntryDist, y: Elem) -> f64 {
    let sum: Complex64 = d
        .support()
        .map(|k| f.char_e(f.mul(k, y)) * d.prob_f64(k))
        .sum();
    sum.norm().min(1.0)
}

/// [`f_abs`] at every point of the field.
pub fn f_table(f: &Field, d: &EntryDist) -> Vec<f64> {
    f.elements().map(|y| f_abs(f, d, y)).collect()
}

/// `T = {y : f_abs(d, y) >= K q^{-1/2}}`.
pub fn threshold_set(f: &Field, d: &EntryDist, k: f64) -> Vec<Elem> {
    assert!(k > 0.0, "K must be positive");
    let cut = k / f64::from(f.q()).sqrt();
    f.elements().filter(|&y| f_abs(f, d, y) >= cut).collect()
}

/// `C q / K^2`, the bound on the size of the threshold set.
pub fn threshold_bound(f: &Field, d: &EntryDist, k: f64) -> f64 {
    d.near_uniform_constant() * f64::from(f.q()) / (k * k)
}

/// `sum_t f_abs(d, t a)^2`.
pub fn parseval_sum(f: &Field, d: &EntryDist, a: Elem) -> f64 {
    let table = f_table(f, d);
    f.elements().map(|t| table[f.mul(t, a) as usize].powi(2)).sum()
}

/// `rho_F(a) = (1/q) sum_{t != 0} prod_{i not in F} f_i(t a_i)` together with
/// the threshold sets for parameters `K` and `M`.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub q: u32,
    pub a: Vec<Elem>,
    pub fixed: BTreeSet<usize>,
    pub rho: f64,
    /// `(t, prod_{i not in F} f_i(t a_i))` for every nonzero `t`.
    pub per_t_products: Vec<(Elem, f64)>,
    pub k: f64,
    pub m: usize,
    /// Threshold set of each distinct entry law.
    pub t_sets: Vec<Vec<Elem>>,
    /// Index into `t_sets` for every coordinate.
    pub law_of: Vec<usize>,
}

impl StructureReport {
    /// `(K q^{-1/2})^M`.
    pub fn claim_bound(&self) -> f64 {
        (self.k / f64::from(self.q).sqrt()).powi(self.m as i32)
    }

    /// Whether every nonzero `t` has at least `M` indices `i` outside `F` with
    /// `t a_i` outside the threshold set; this forces `rho <= (K q^{-1/2})^M`.
    pub fn claim1_holds(&self, f: &Field) -> bool {
        self.per_t_products.iter().all(|&(t, _)| {
            let outside = (0..self.a.len())
                .filter(|i| !self.fixed.contains(i))
                .filter(|&i| {
                    let y = f.mul(t, self.a[i]);
                    !self.t_sets[self.law_of[i]].contains(&y)
                })
                .count();
            outside >= self.m
        })
    }

    pub fn max_product(&self) -> f64 {
        self.per_t_products.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// Compute the structure report of `a`; `dists[i]` is the law of coordinate
/// `i` and coordinates in `fixed` are skipped.
pub fn structure_report(
    f: &Field,
    a: &[Elem],
    dists: &[EntryDist],
    fixed: &BTreeSet<usize>,
    k: f64,
    m: usize,
) -> StructureReport {
    assert_eq!(a.len(), dists.len(), "one law per coordinate");
    let mut laws: Vec<&EntryDist> = Vec::new();
    let law_of: Vec<usize> = dists
        .iter()
        .map(|d| match laws.iter().position(|l| *l == d) {
            Some(p) => p,
            None => {
                laws.push(d);
                laws.len() - 1
            }
        })
        .collect();
    let tables: Vec<Vec<f64>> = laws.iter().map(|d| f_table(f, d)).collect();
    let per_t_products: Vec<(Elem, f64)> = f
        .elements()
        .skip(1)
        .map(|t| {
            let prod = (0..a.len())
                .filter(|i| !fixed.contains(i))
                .map(|i| tables[law_of[i]][f.mul(t, a[i]) as usize])
                .product();
            (t, prod)
        })
        .collect();
    let rho = per_t_products.iter().map(|p| p.1).sum::<f64>() / f64::from(f.q());
    StructureReport {
        q: f.q(),
        a: a.to_vec(),
        fixed: fixed.clone(),
        rho,
        per_t_products,
        k,
        m,
        t_sets: laws.iter().map(|d| threshold_set(f, d, k)).collect(),
        law_of,
    }
}

/// `rho_F(a)` alone.
pub fn rho(f: &Field, a: &[Elem], dists: &[EntryDist], fixed: &BTreeSet<usize>) -> f64 {
    structure_report(f, a, dists, fixed, 1.0, 0).rho
}

/// `q 2^n |T|^{n-M-|F|} q^{M+|F|}`, the bound on the number of vectors with
/// `rho_F >= (K q^{-1/2})^M` when all coordinates share one law.
pub fn counting_bound(q: u32, n: usize, t_size: usize, m: usize, fixed: usize) -> f64 {
    let free = n.saturating_sub(m + fixed) as i32;
    f64::from(q) * 2f64.powi(n as i32) * (t_size as f64).powi(free) * f64::from(q).powi((m + fixed) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn f_abs_examples() {
        let f = field(3);
        let u = EntryDist::uniform(3);
        assert!(f_abs(&f, &u, 1) < 1e-12);
        assert!((f_abs(&f, &u, 0) - 1.0).abs() < 1e-12);
        let half = EntryDist::from_weights(vec![1, 1, 0]).unwrap();
        assert!((f_abs(&f, &half, 1) - 0.5).abs() < 1e-12);
        let g = field(9);
        let d = EntryDist::from_weights(vec![3, 1, 0, 2, 0, 0, 1, 1, 1]).unwrap();
        assert!((f_abs(&g, &d, 0) - 1.0).abs() < 1e-12);
        assert!(g.elements().all(|y| f_abs(&g, &d, y) <= 1.0));
    }

    #[test]
    fn rho_examples() {
        let f = field(3);
        let half = EntryDist::from_weights(vec![1, 1, 0]).unwrap();
        let none = BTreeSet::new();
        let r = rho(&f, &[1, 1], &[half.clone(), half.clone()], &none);
        assert!((r - 1.0 / 6.0).abs() < 1e-12);
        let u = vec![EntryDist::uniform(3); 3];
        assert!(rho(&f, &[0, 2, 0], &u, &none) < 1e-12);
        let inside: BTreeSet<usize> = [1].into();
        assert!((rho(&f, &[0, 2, 0], &u, &inside) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        let f = field(7);
        let u = EntryDist::uniform(7);
        assert_eq!(threshold_set(&f, &u, 1.0), vec![0]);
        assert!(threshold_set(&f, &u, 3.0).is_empty());
        let g = field(101);
        let d = EntryDist::near_uniform(&g, &(51..101).collect::<Vec<_>>()).unwrap();
        let t = threshold_set(&g, &d, 3.0);
        assert!(t.len() as f64 <= threshold_bound(&g, &d, 3.0));
        assert!(t.contains(&0));
    }

    #[test]
    fn claim1_and_bound() {
        let f = field(5);
        let d = EntryDist::from_weights(vec![2, 1, 1, 1, 0]).unwrap();
        let dists = vec![d; 4];
        let report = structure_report(&f, &[1, 2, 3, 4], &dists, &BTreeSet::new(), 1.5, 2);
        if report.claim1_holds(&f) {
            assert!(report.rho <= report.claim_bound() + 1e-12);
        }
        assert!(report.rho <= (4.0 / 5.0) * report.max_product() + 1e-12);
    }
}
