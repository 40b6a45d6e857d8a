//! Limiting corank laws as n grows, evaluated to high precision.
//!
//! Every limiting mass has the form `c_k * P` where `c_k` is an exact rational
//! and `P` is one of the infinite products `prod_{i>=1} (1 - q^-i)` or
//! `prod_{i>=0} (1 - q^{-2i-1})`. The products are cut once the next factor is
//! within [`PRODUCT_CUTOFF`] of 1 and replaced by a rational lower bound, so
//! every reported mass is a lower bound of the true mass. Everything missing,
//! from the product cut, the support cut and decimal rounding, is accounted
//! for in `tail_bound`.

use bigdecimal::BigDecimal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::pmf::{rational_to_decimal, round_up, CorankPmf};
use crate::algebra::Field;
use crate::error::{Error, Result};

/// Factors `1 - q^-e` with `q^-e` below this are dropped from infinite products.
pub const PRODUCT_CUTOFF: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    fn matches(self, k: usize) -> bool {
        Parity::of(k) == self
    }
}

fn q_pow(q: u32, e: u64) -> BigInt {
    Pow::pow(BigInt::from(q), e)
}

fn inv_q_pow(q: u32, e: u64) -> BigRational {
    BigRational::new(BigInt::one(), q_pow(q, e))
}

/// Rigorous bracket `[lower, upper]` of `prod_{e in exps} (1 - q^-e)` over an
/// increasing exponent sequence, plus the relative gap bound.
struct Product {
    lower: BigRational,
    rel_gap: BigRational,
}

impl Product {
    fn new(q: u32, mut exps: impl Iterator<Item = u64>) -> Self {
        let cutoff = BigRational::new(BigInt::one(), Pow::pow(BigInt::from(10), 30u32));
        let mut partial = BigRational::one();
        loop {
            let e = exps.next().expect("infinite exponent sequence");
            let term = inv_q_pow(q, e);
            if term < cutoff {
                // omitted exponents are >= e and strictly increasing, so
                // sum_{omitted} q^-e' <= q^-e * q / (q - 1); and
                // prod (1 - x_i) >= 1 - sum x_i.
                let omitted = term * BigRational::new(q.into(), (q - 1).into());
                let lower = &partial * (BigRational::one() - &omitted);
                return Self {
                    lower,
                    rel_gap: omitted,
                };
            }
            partial *= BigRational::one() - term;
        }
    }

    fn euler(q: u32) -> Self {
        Self::new(q, 1..)
    }

    fn odd(q: u32) -> Self {
        Self::new(q, (0..).map(|i| 2 * i + 1))
    }
}

/// `prod_{i=1}^{k} (1 - q^-i)`.
fn euler_partial(q: u32, k: u64) -> BigRational {
    (1..=k).fold(BigRational::one(), |acc, i| acc * (BigRational::one() - inv_q_pow(q, i)))
}

/// `prod_{i=1}^{k} (q^i - 1)`.
fn q_factorial_minus(q: u32, k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * (q_pow(q, i) - 1))
}

/// Shared driver: masses `coef(k) * product` over the support selected by
/// `keep`, stopping once the analytic tail bound `q^{-tail_exp(K)} q/((q-1) P)`
/// falls below `tol`.
fn build(
    q: u32,
    tol: f64,
    product: &Product,
    keep: impl Fn(usize) -> bool,
    coef: impl Fn(u64) -> BigRational,
    tail_exp: impl Fn(u64) -> u64,
) -> CorankPmf {
    assert!(tol > 0.0 && tol <= 1e-6, "tolerance must lie in (0, 1e-6]");
    let tol_r = BigRational::from_float(tol).expect("finite tolerance");
    let euler_lower = Product::euler(q).lower;
    let geometric = BigRational::new(q.into(), (q - 1).into());
    let mut support = Vec::new();
    let mut k = 0u64;
    let tail = loop {
        if keep(k as usize) {
            let mass = coef(k) * &product.lower;
            support.push((k as usize, rational_to_decimal(&mass)));
        }
        k += 1;
        // first kept index >= k
        let next = (k..).find(|&j| keep(j as usize)).expect("kept indices are unbounded");
        let tail = inv_q_pow(q, tail_exp(next)) * &geometric / &euler_lower;
        if tail < tol_r {
            break tail;
        }
    };
    let gap = &product.rel_gap / (BigRational::one() - &product.rel_gap);
    // each decimal mass is rounded down by at most one unit in the 60th digit
    let rounding = BigRational::new(
        BigInt::from(support.len()),
        Pow::pow(BigInt::from(10), 59u32),
    );
    let tail_bound = round_up(rational_to_decimal(&(tail + gap + rounding)) + BigDecimal::new(1.into(), 59));
    CorankPmf::truncated(q, support, tail_bound)
}

/// `P(Q_inf = k) = q^{-k^2} prod_{i>k} (1 - q^-i) / prod_{i=1}^{k} (1 - q^-i)`.
pub fn limit_square_pmf(f: &Field, tol: f64) -> CorankPmf {
    limit_rect_pmf(0, f, tol).with_param("ensemble", "square")
}

/// `P(Q_{m,inf} = k) = q^{-k(m+k)} prod_{i>k} (1 - q^-i) / prod_{i=1}^{m+k} (1 - q^-i)`.
pub fn limit_rect_pmf(m: usize, f: &Field, tol: f64) -> CorankPmf {
    let q = f.q();
    let m = m as u64;
    let euler = Product::euler(q);
    // prod_{i>k} = P / prod_{i<=k}
    let coef = |k: u64| {
        inv_q_pow(q, k * (m + k)) / (euler_partial(q, k) * euler_partial(q, m + k))
    };
    build(q, tol, &euler, |_| true, coef, |k| k * (m + k))
        .with_param("ensemble", "rectangular")
        .with_param("m", m)
}

/// `P(Q_sym = k) = prod_{i>=0} (1 - q^{-2i-1}) / prod_{i=1}^{k} (q^i - 1)`.
pub fn limit_sym_pmf(f: &Field, tol: f64) -> CorankPmf {
    let q = f.q();
    let odd = Product::odd(q);
    let coef = |k: u64| BigRational::new(BigInt::one(), q_factorial_minus(q, k));
    build(q, tol, &odd, |_| true, coef, |k| k * (k + 1) / 2).with_param("ensemble", "symmetric")
}

/// `P(Q_alt = k) = prod_{i>=0} (1 - q^{-2i-1}) q^k / prod_{i=1}^{k} (q^i - 1)` on
/// coranks of the given parity.
pub fn limit_alt_pmf(f: &Field, parity: Parity, tol: f64) -> Result<CorankPmf> {
    let q = f.q();
    if q.is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(q));
    }
    let odd = Product::odd(q);
    let coef = |k: u64| BigRational::new(q_pow(q, k), q_factorial_minus(q, k));
    let tail_exp = |k: u64| if k == 0 { 0 } else { k * (k - 1) / 2 };
    Ok(build(q, tol, &odd, |k| parity.matches(k), coef, tail_exp)
        .with_param("ensemble", "alternating")
        .with_param("parity", parity.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bigdecimal::ToPrimitive;

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    /// Direct float evaluation of prod_{i=1}^{400} (1 - q^-i) with a
    /// geometric tail bound; independent of the rational machinery.
    fn euler_float(q: f64) -> f64 {
        (1..=400).map(|i| 1.0 - q.powi(-i)).product()
    }

    #[test]
    fn square_mass_at_zero() {
        let p = limit_square_pmf(&field(2), 1e-12);
        assert!(close(p.f64_mass(0), 0.2887880951, 1e-10));
        assert!(close(p.f64_mass(0), euler_float(2.0), 1e-15));
        for q in [101u64, 103, 127] {
            let p = limit_square_pmf(&field(q), 1e-9);
            assert!(p.f64_mass(0) >= 1.0 - 2.0 / q as f64);
        }
    }

    #[test]
    fn totals_within_tolerance() {
        for q in [2u64, 3, 4, 5, 7] {
            let tol = 1e-9;
            let f = field(q);
            let mut laws = vec![
                limit_square_pmf(&f, tol),
                limit_rect_pmf(1, &f, tol),
                limit_rect_pmf(3, &f, tol),
                limit_sym_pmf(&f, tol),
            ];
            if q % 2 == 1 {
                laws.push(limit_alt_pmf(&f, Parity::Even, tol).unwrap());
                laws.push(limit_alt_pmf(&f, Parity::Odd, tol).unwrap());
            }
            for law in laws {
                let total = law.decimal_total();
                let with_tail = &total + law.tail_bound();
                assert!(total <= 1, "{:?}", law.params());
                let dev = (with_tail - BigDecimal::from(1)).abs().to_f64().unwrap();
                assert!(dev <= tol, "q={q} {:?} dev={dev}", law.params());
                // the remainder really is missing mass: 1 - total <= tail_bound
                assert!(BigDecimal::from(1) - total <= *law.tail_bound());
            }
        }
    }

    #[test]
    fn rect_zero_matches_square() {
        let f = field(3);
        let a = limit_rect_pmf(0, &f, 1e-10);
        let b = limit_square_pmf(&f, 1e-10);
        assert_eq!(a.support(), b.support());
    }

    #[test]
    fn symmetric_binary_masses() {
        let p = limit_sym_pmf(&field(2), 1e-12);
        let expect: f64 = (0..200).map(|i| 1.0 - 2f64.powi(-2 * i - 1)).product();
        assert!(close(p.f64_mass(0), expect, 1e-15));
        assert!(close(p.f64_mass(0), 0.4194, 1e-4));
        assert_eq!(p.mass(0), p.mass(1));
    }

    #[test]
    fn alternating_ternary_masses() {
        let even = limit_alt_pmf(&field(3), Parity::Even, 1e-12).unwrap();
        assert!(close(even.f64_mass(0), 0.6390, 1e-4));
        assert!(close(even.f64_mass(2), 0.3594, 1e-4));
        assert!(even.support().iter().all(|(k, _)| k % 2 == 0));
        let odd = limit_alt_pmf(&field(3), Parity::Odd, 1e-12).unwrap();
        assert!(odd.support().iter().all(|(k, _)| k % 2 == 1));
        assert!(limit_alt_pmf(&field(2), Parity::Even, 1e-9).is_err());
    }

    #[test]
    fn product_lower_bound_is_tight() {
        let lower = Product::euler(2).lower.to_f64().unwrap();
        assert!(close(lower, euler_float(2.0), 1e-16));
        assert!(Product::euler(2).rel_gap < BigRational::from_float(3e-30).unwrap());
    }
}
