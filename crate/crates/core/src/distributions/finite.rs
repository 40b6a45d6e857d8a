//! Exact finite-n corank laws of the uniform ensembles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::pmf::CorankPmf;
use crate::algebra::Field;
use crate::error::{Error, Result};

fn q_pow(q: u32, e: u64) -> BigInt {
    Pow::pow(BigInt::from(q), e)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `prod_{i=from}^{to} (1 - q^-i)`, empty products are 1.
fn euler_partial(q: u32, from: u64, to: u64) -> BigRational {
    (from..=to)
        .map(|i| {
            let qi = q_pow(q, i);
            ratio(&qi - 1, qi)
        })
        .fold(BigRational::one(), |acc, x| acc * x)
}

/// Corank law of a uniform n x (n+m) matrix:
/// `P(Q = k) = q^{-k(m+k)} prod_{1..n+m} prod_{k+1..n} / (prod_{1..n-k} prod_{1..m+k})`
/// with `prod_{a..b} = prod_{i=a}^{b} (1 - q^-i)`.
pub fn uniform_rect_pmf(n: usize, m: usize, f: &Field) -> CorankPmf {
    assert!(n >= 1, "n must be positive");
    let q = f.q();
    let (n64, m64) = (n as u64, m as u64);
    let full = euler_partial(q, 1, n64 + m64);
    let masses = (0..=n64)
        .map(|k| {
            let num = &full * euler_partial(q, k + 1, n64);
            let den = euler_partial(q, 1, n64 - k) * euler_partial(q, 1, m64 + k);
            num / den / BigRational::from_integer(q_pow(q, k * (m64 + k)))
        })
        .collect();
    CorankPmf::exact(q, masses)
        .with_param("ensemble", if m == 0 { "square" } else { "rectangular" })
        .with_param("n", n)
        .with_param("m", m)
}

/// Corank law of a uniform n x n matrix.
pub fn uniform_square_pmf(n: usize, f: &Field) -> CorankPmf {
    uniform_rect_pmf(n, 0, f)
}

/// Corank law of a uniform symmetric n x n matrix:
/// `P(Q = k) = q^{-n(n+1)/2} prod_{i=1}^{floor((n-k)/2)} q^{2i}/(q^{2i}-1) prod_{i=0}^{n-k-1} (q^{n-i}-1)`.
pub fn uniform_sym_pmf(n: usize, f: &Field) -> CorankPmf {
    assert!(n >= 1, "n must be positive");
    let q = f.q();
    let n64 = n as u64;
    let masses = (0..=n64)
        .map(|k| {
            let mut mass = ratio(BigInt::one(), q_pow(q, n64 * (n64 + 1) / 2));
            for i in 1..=(n64 - k) / 2 {
                let q2i = q_pow(q, 2 * i);
                mass *= ratio(q2i.clone(), q2i - 1);
            }
            for i in 0..n64 - k {
                mass *= BigRational::from_integer(q_pow(q, n64 - i) - 1);
            }
            mass
        })
        .collect();
    CorankPmf::exact(q, masses)
        .with_param("ensemble", "symmetric")
        .with_param("n", n)
}

/// Corank law of a uniform alternating n x n matrix (q odd):
/// `P(Q = k) = q^{-n(n-1)/2} prod_{i=1}^{(n-k)/2} q^{2i-2}/(q^{2i}-1) prod_{i=0}^{n-k-1} (q^{n-i}-1)`
/// for k of the parity of n, zero otherwise.
pub fn uniform_alt_pmf(n: usize, f: &Field) -> Result<CorankPmf> {
    assert!(n >= 1, "n must be positive");
    let q = f.q();
    if q.is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(q));
    }
    let n64 = n as u64;
    let masses = (0..=n64)
        .map(|k| {
            if (n64 - k) % 2 == 1 {
                return BigRational::from_integer(0.into());
            }
            let mut mass = ratio(BigInt::one(), q_pow(q, n64 * (n64 - 1) / 2));
            for i in 1..=(n64 - k) / 2 {
                mass *= ratio(q_pow(q, 2 * i - 2), q_pow(q, 2 * i) - 1);
            }
            for i in 0..n64 - k {
                mass *= BigRational::from_integer(q_pow(q, n64 - i) - 1);
            }
            mass
        })
        .collect();
    Ok(CorankPmf::exact(q, masses)
        .with_param("ensemble", "alternating")
        .with_param("n", n))
}
