//! Arithmetic in F_q, q = p^k.
//!
//! Elements are integers in `[0, q)`. For k > 1 an element `v` encodes the
//! polynomial `sum_i d_i x^i` where `d_i` are the base-p digits of `v`, reduced
//! modulo a fixed monic irreducible polynomial of degree k. Multiplication in
//! extension fields goes through discrete log tables over a primitive element.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_Q: u64 = 1 << 16;

/// A field element, always the canonical representative in `[0, q)`.
pub type Elem = u32;

/// The finite field F_q together with its arithmetic tables.
///
/// Cloning is cheap: the tables are shared.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

struct Inner {
    q: u32,
    p: u32,
    k: u32,
    /// Coefficients of the modulus, constant term first, length k + 1 (monic).
    modulus: Vec<u32>,
    repr: Repr,
    trace: Vec<u32>,
}

enum Repr {
    Prime,
    Extension {
        /// `log[v]` for v != 0.
        log: Vec<u32>,
        /// `exp[i] = g^i`, doubled in length so sums of two logs index directly.
        exp: Vec<u32>,
    },
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.q())
            .field("p", &self.p())
            .field("k", &self.k())
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q() == other.q()
    }
}

impl Eq for Field {}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

/// Multiply two polynomials over F_p (coefficient vectors, constant first)
/// and reduce modulo the monic `modulus`.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % u64::from(p);
        }
    }
    for deg in (k..2 * k).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        // x^deg = x^(deg-k) * x^k and x^k = -(lower terms of modulus)
        for (i, &m) in modulus[..k].iter().enumerate() {
            let sub = c * u64::from(m) % u64::from(p);
            let idx = deg - k + i;
            prod[idx] = (prod[idx] + u64::from(p) - sub) % u64::from(p);
        }
    }
    prod.truncate(k);
    prod.into_iter().map(|c| c as u32).collect()
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Remainder of `a` divided by `b` over F_p; both constant-first, `b` nonzero with
/// a nonzero leading coefficient at its last position.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| u64::from(x)).collect();
    let db = b.len() - 1;
    let lead_inv = mod_inv(u64::from(b[db]), u64::from(p));
    while r.len() > db {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if top != 0 {
            let c = top * lead_inv % u64::from(p);
            for (i, &bi) in b.iter().enumerate() {
                let sub = c * u64::from(bi) % u64::from(p);
                r[shift + i] = (r[shift + i] + u64::from(p) - sub) % u64::from(p);
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| x as u32).collect()
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    // Any factorization has a monic factor of degree <= k/2.
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut f = digits(low, p, d as u32);
            f.push(1);
            if poly_rem(poly, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree k over F_p.
///
/// Candidates are ordered by the integer whose base-p digits are the
/// non-leading coefficients, so the comparison starts from the x^(k-1)
/// coefficient.
fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    for low in 0..p.pow(k) {
        let mut f = digits(low, p, k);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Construct F_q. Fails unless q is a prime power in `[2, 2^16]`.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_Q {
            return Err(Error::TooLarge(q));
        }
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        let p = smallest_prime_factor(q);
        let mut rest = q;
        let mut k = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower(q));
        }
        let (q, p) = (q as u32, p as u32);
        let (modulus, repr) = if k == 1 {
            (vec![0, 1], Repr::Prime)
        } else {
            let modulus = least_irreducible(p, k);
            let (log, exp) = Self::build_log_tables(q, p, k, &modulus);
            (modulus, Repr::Extension { log, exp })
        };
        let mut field = Field {
            inner: Arc::new(Inner {
                q,
                p,
                k,
                modulus,
                repr,
                trace: Vec::new(),
            }),
        };
        let trace = (0..q).map(|x| field.trace_slow(x)).collect();
        Arc::get_mut(&mut field.inner).expect("unshared").trace = trace;
        Ok(field)
    }

    fn build_log_tables(q: u32, p: u32, k: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let order = (q - 1) as usize;
        // The modulus need not be primitive, so search for a generator.
        for cand in 2..q {
            let g = digits(cand, p, k);
            let mut exp = Vec::with_capacity(2 * order);
            let mut cur = digits(1, p, k);
            let mut period = 0usize;
            loop {
                exp.push(undigits(&cur, p));
                cur = poly_mulmod(&cur, &g, modulus, p);
                period += 1;
                if undigits(&cur, p) == 1 {
                    break;
                }
            }
            if period == order {
                let mut log = vec![0u32; q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                let first = exp.clone();
                exp.extend(first);
                return (log, exp);
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Characteristic.
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    /// Extension degree over F_p.
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_prime(&self) -> bool {
        self.inner.k == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.inner.p;
        if self.inner.k == 1 {
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else if p == 2 {
            a ^ b
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.inner.k {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place *= p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.inner.p;
        if self.inner.k == 1 {
            if a == 0 {
                0
            } else {
                p - a
            }
        } else if p == 2 {
            a
        } else {
            let mut a = a;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.inner.k {
                out += ((p - a % p) % p) * place;
                a /= p;
                place *= p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.repr {
            Repr::Prime => ((u64::from(a) * u64::from(b)) % u64::from(self.inner.p)) as u32,
            Repr::Extension { log, exp } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "zero has no inverse");
        match &self.inner.repr {
            Repr::Prime => mod_inv(u64::from(a), u64::from(self.inner.p)) as u32,
            Repr::Extension { log, exp } => {
                let l = log[a as usize];
                exp[((self.q() - 1 - l) % (self.q() - 1)) as usize]
            }
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    fn trace_slow(&self, x: Elem) -> u32 {
        let mut acc = 0;
        let mut cur = x;
        for _ in 0..self.k() {
            acc = self.add(acc, cur);
            cur = self.pow(cur, u64::from(self.p()));
        }
        // The trace lies in the prime subfield, which is encoded as [0, p).
        debug_assert!(acc < self.p());
        acc
    }

    /// Absolute trace `x + x^p + ... + x^(p^(k-1))`, as an element of F_p.
    #[inline]
    pub fn trace(&self, x: Elem) -> u32 {
        self.inner.trace[x as usize]
    }

    /// The additive character `exp(2 pi i tr(t) / p)`.
    pub fn char_e(&self, t: Elem) -> Complex64 {
        let angle = 2.0 * PI * f64::from(self.trace(t)) / f64::from(self.p());
        Complex64::from_polar(1.0, angle)
    }

    /// Panics unless `x` is a valid element.
    pub fn check(&self, x: Elem) {
        assert!(x < self.q(), "{x} is not an element of F_{}", self.q());
    }

    /// `dst[i] -= factor * src[i]` for all i.
    pub(crate) fn sub_scaled(&self, dst: &mut [Elem], src: &[Elem], factor: Elem) {
        if factor == 0 {
            return;
        }
        match &self.inner.repr {
            Repr::Prime => {
                let p = u64::from(self.inner.p);
                let nf = p - u64::from(factor);
                for (d, &s) in dst.iter_mut().zip(src) {
                    if s != 0 {
                        *d = ((u64::from(*d) + nf * u64::from(s)) % p) as u32;
                    }
                }
            }
            Repr::Extension { .. } => {
                let nf = self.neg(factor);
                for (d, &s) in dst.iter_mut().zip(src) {
                    if s != 0 {
                        *d = self.add(*d, self.mul(nf, s));
                    }
                }
            }
        }
    }

    /// `row[i] *= factor` for all i.
    pub(crate) fn scale(&self, row: &mut [Elem], factor: Elem) {
        for x in row.iter_mut() {
            *x = self.mul(*x, factor);
        }
    }

    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        let f = Field::new(7).unwrap();
        assert_eq!((f.p(), f.k()), (7, 1));
        let f = Field::new(9).unwrap();
        assert_eq!((f.p(), f.k()), (3, 2));
        assert_eq!(Field::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(Field::new(70000).unwrap_err(), Error::TooLarge(70000));
        assert!(Field::new(65536).is_ok());
    }

    #[test]
    fn least_moduli() {
        assert_eq!(Field::new(4).unwrap().modulus(), &[1, 1, 1]);
        // x^3 + x + 1 precedes x^3 + x^2 + 1
        assert_eq!(Field::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        // x^2 + 1 is irreducible over F_3
        assert_eq!(Field::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(16).unwrap().modulus(), &[1, 1, 0, 0, 1]);
    }

    #[test]
    fn axioms_exhaustive() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_values() {
        let f = Field::new(7).unwrap();
        for x in f.elements() {
            assert_eq!(f.trace(x), x);
        }
        let f4 = Field::new(4).unwrap();
        assert_eq!(f4.trace(0), 0);
        // g = x, with g^2 = g + 1: tr(g) = g + g^2 = 1
        assert_eq!(f4.trace(2), 1);
        assert_eq!(f4.trace(3), 1);
        assert_eq!(f4.trace(1), 0);
    }

    #[test]
    fn trace_is_linear_and_onto() {
        for q in [4, 8, 9, 16, 25, 27] {
            let f = Field::new(q).unwrap();
            let mut hits = vec![0usize; f.p() as usize];
            for a in f.elements() {
                hits[f.trace(a) as usize] += 1;
                for b in f.elements() {
                    let lhs = f.trace(f.add(a, b));
                    assert_eq!(lhs, (f.trace(a) + f.trace(b)) % f.p());
                }
            }
            // equidistributed over F_p
            assert!(hits.iter().all(|&h| h as u32 == q as u32 / f.p()));
        }
    }

    #[test]
    fn character_values() {
        let f = Field::new(2).unwrap();
        assert!((f.char_e(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.char_e(1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn indicator_identity() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                let s: Complex64 = f.elements().map(|t| f.char_e(f.mul(a, t))).sum();
                let expect = if a == 0 { f64::from(f.q()) } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-9, "q={q} a={a}");
            }
        }
    }
}
