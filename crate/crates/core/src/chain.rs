//! Exact corank Markov chains of the uniform exposure processes.
//!
//! Exposing one more row and column of a uniform symmetric or alternating
//! matrix moves the corank by at most one, with probabilities that depend only
//! on the current corank. Exposing one more uniform column of an n-row matrix
//! grows the span dimension by at most one. All computations are exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::Field;
use crate::distributions::CorankPmf;
use crate::error::{Error, Result};

/// Largest step count accepted by [`max_positive_path_exhaustive`].
pub const MAX_ENUMERATED_STEPS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    /// Corank of the top-left block of a uniform symmetric matrix.
    Symmetric,
    /// Corank of the top-left block of a uniform alternating matrix.
    Alternating,
    /// Span dimension of the first columns of a uniform matrix with `n` rows.
    IidColumn { n: usize },
}

impl ChainKind {
    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Symmetric => "symmetric",
            ChainKind::Alternating => "alternating",
            ChainKind::IidColumn { .. } => "iid-column",
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    /// `iid-column` parses with `n = 0`; set it with [`ChainSpec::iid_column`].
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(ChainKind::Symmetric),
            "alternating" => Ok(ChainKind::Alternating),
            "iid-column" => Ok(ChainKind::IidColumn { n: 0 }),
            _ => Err(Error::Parse(format!("unknown chain kind {s:?}"))),
        }
    }
}

/// One-step probabilities from a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub down: BigRational,
    pub stay: BigRational,
    pub up: BigRational,
}

impl Transition {
    pub fn total(&self) -> BigRational {
        &self.down + &self.stay + &self.up
    }

    fn by_move(&self, delta: i32) -> &BigRational {
        match delta {
            -1 => &self.down,
            0 => &self.stay,
            _ => &self.up,
        }
    }
}

fn inv_q_pow(q: u32, e: u64) -> BigRational {
    BigRational::new(BigInt::one(), Pow::pow(BigInt::from(q), e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub field: Field,
    /// Largest reachable state; `None` grows the state space with the step count.
    pub cap: Option<usize>,
}

impl ChainSpec {
    pub fn new(kind: ChainKind, f: &Field) -> Result<Self> {
        if kind == ChainKind::Alternating && f.q().is_multiple_of(2) {
            return Err(Error::EvenCharacteristic(f.q()));
        }
        let cap = match kind {
            ChainKind::IidColumn { n } => Some(n),
            _ => None,
        };
        Ok(Self {
            kind,
            field: f.clone(),
            cap,
        })
    }

    pub fn symmetric(f: &Field) -> Self {
        Self::new(ChainKind::Symmetric, f).expect("no restriction")
    }

    pub fn alternating(f: &Field) -> Result<Self> {
        Self::new(ChainKind::Alternating, f)
    }

    pub fn iid_column(n: usize, f: &Field) -> Self {
        Self::new(ChainKind::IidColumn { n }, f).expect("no restriction")
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    /// Step probabilities from state `k`.
    pub fn transition(&self, k: usize) -> Transition {
        transition(self.kind, k, &self.field)
    }

    /// Law of the state after `steps` steps from `initial`.
    ///
    /// For the iid-column chain the state is the span dimension; see
    /// [`ChainSpec::to_corank`].
    pub fn evolve(&self, initial: &CorankPmf, steps: usize) -> Result<CorankPmf> {
        let start = initial.max_corank().unwrap_or(0);
        let cap = self.cap.unwrap_or(start + steps);
        if start > cap {
            return Err(Error::CapExceeded { cap });
        }
        let mut law: Vec<BigRational> = (0..=cap)
            .map(|k| {
                initial
                    .exact_mass(k)
                    .ok_or_else(|| Error::InvalidSpec("initial law must be exact".into()))
            })
            .collect::<Result<_>>()?;
        let table: Vec<Transition> = (0..=cap).map(|k| self.transition(k)).collect();
        for _ in 0..steps {
            let mut next = vec![BigRational::zero(); cap + 1];
            for (k, mass) in law.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                let t = &table[k];
                if k > 0 {
                    next[k - 1] += mass * &t.down;
                }
                next[k] += mass * &t.stay;
                if !t.up.is_zero() {
                    if k == cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    next[k + 1] += mass * &t.up;
                }
            }
            law = next;
        }
        Ok(CorankPmf::exact(self.field.q(), law)
            .with_param("chain", self.kind.name())
            .with_param("steps", steps))
    }

    /// Map a span-dimension law of the iid-column chain to the corank law
    /// `n - dim`; other chains already track corank.
    pub fn to_corank(&self, law: &CorankPmf) -> CorankPmf {
        match self.kind {
            ChainKind::IidColumn { n } => {
                let masses = (0..=n)
                    .map(|c| law.exact_mass(n - c).expect("exact law"))
                    .collect();
                CorankPmf::exact(self.field.q(), masses).with_param("chain", "iid-column")
            }
            _ => law.clone(),
        }
    }

    /// Exact probability that the chain started at `x0` visits 0 within `steps`.
    pub fn hit_zero_prob(&self, x0: usize, steps: usize) -> BigRational {
        if x0 == 0 {
            return BigRational::one();
        }
        let cap = self.cap.unwrap_or(x0 + steps).max(x0);
        let table: Vec<Transition> = (0..=cap).map(|k| self.transition(k)).collect();
        let mut law = vec![BigRational::zero(); cap + 1];
        law[x0] = BigRational::one();
        let mut absorbed = BigRational::zero();
        for _ in 0..steps {
            let mut next = vec![BigRational::zero(); cap + 1];
            for (k, mass) in law.iter().enumerate().skip(1) {
                if mass.is_zero() {
                    continue;
                }
                let t = &table[k];
                if k == 1 {
                    absorbed += mass * &t.down;
                } else {
                    next[k - 1] += mass * &t.down;
                }
                next[k] += mass * &t.stay;
                if k < cap {
                    next[k + 1] += mass * &t.up;
                }
            }
            law = next;
        }
        absorbed
    }

    /// The path that descends to corank 1 and then alternates between 1 and 2,
    /// with its exact probability.
    ///
    /// When the number of steps left after the descent is odd, a symmetric
    /// path stays once at corank 1 at the end (staying there is at least as
    /// likely as moving up) while an alternating path ends with a move up.
    pub fn most_likely_positive_path(&self, x0: usize, steps: usize) -> Result<(Vec<usize>, BigRational)> {
        self.check_corank_chain()?;
        if x0 == 0 {
            return Err(Error::InvalidSpec("a positive path needs x0 >= 1".into()));
        }
        let mut path = vec![x0];
        let mut cur = x0;
        while path.len() <= steps {
            let next = if cur > 1 {
                cur - 1
            } else {
                let left = steps + 1 - path.len();
                if left == 1 && self.kind == ChainKind::Symmetric {
                    1
                } else {
                    2
                }
            };
            path.push(next);
            cur = next;
        }
        let prob = self.path_prob(&path);
        Ok((path, prob))
    }

    /// Exact probability of following `path` step by step.
    pub fn path_prob(&self, path: &[usize]) -> BigRational {
        let mut prob = BigRational::one();
        for w in path.windows(2) {
            let delta = w[1] as i64 - w[0] as i64;
            if delta.abs() > 1 {
                return BigRational::zero();
            }
            prob *= self.transition(w[0]).by_move(delta as i32);
        }
        prob
    }

    /// Maximum probability over all paths that stay at corank >= 1, by
    /// enumerating them; returns one maximising path.
    pub fn max_positive_path_exhaustive(&self, x0: usize, steps: usize) -> Result<(Vec<usize>, BigRational)> {
        self.check_corank_chain()?;
        if x0 == 0 {
            return Err(Error::InvalidSpec("a positive path needs x0 >= 1".into()));
        }
        if steps > MAX_ENUMERATED_STEPS {
            return Err(Error::TooLargeToEnumerate(format!(
                "{steps} steps, at most {MAX_ENUMERATED_STEPS}"
            )));
        }
        let table: Vec<[f64; 3]> = (0..=x0 + steps)
            .map(|k| {
                let t = self.transition(k);
                [&t.down, &t.stay, &t.up].map(|p| p.to_f64().expect("finite"))
            })
            .collect();
        let mut best = 0.0;
        let mut kept = Vec::new();
        explore(&table, steps, &mut vec![x0], 1.0, &mut best, &mut kept);
        // resolve near-ties exactly
        let mut winner = (Vec::new(), BigRational::zero());
        for (_, path) in kept {
            let p = self.path_prob(&path);
            if p > winner.1 {
                winner = (path, p);
            }
        }
        Ok(winner)
    }

    fn check_corank_chain(&self) -> Result<()> {
        match self.kind {
            ChainKind::IidColumn { .. } => Err(Error::InvalidSpec(
                "positive paths are defined for the symmetric and alternating chains".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Walk every positive path with double-precision probabilities, keeping all
/// paths within a relative `1e-9` of the running maximum. Rounding error over
/// at most 14 factors is far below that, so the exact maximisers are among
/// the kept paths.
fn explore(
    table: &[[f64; 3]],
    steps: usize,
    path: &mut Vec<usize>,
    prob: f64,
    best: &mut f64,
    kept: &mut Vec<(f64, Vec<usize>)>,
) {
    if path.len() == steps + 1 {
        if prob >= *best * (1.0 - 1e-9) {
            if prob > *best {
                *best = prob;
                let cut = prob * (1.0 - 1e-9);
                kept.retain(|(p, _)| *p >= cut);
            }
            kept.push((prob, path.clone()));
        }
        return;
    }
    let cur = *path.last().expect("nonempty");
    for (m, delta) in [-1i64, 0, 1].into_iter().enumerate() {
        let next = cur as i64 + delta;
        let p = table[cur][m];
        if next < 1 || p == 0.0 {
            continue;
        }
        path.push(next as usize);
        explore(table, steps, path, prob * p, best, kept);
        path.pop();
    }
}

/// Step probabilities `(down, stay, up)` from state `k`.
pub fn transition(kind: ChainKind, k: usize, f: &Field) -> Transition {
    let q = f.q();
    let k64 = k as u64;
    let zero = BigRational::zero;
    match kind {
        ChainKind::Symmetric => {
            let a = inv_q_pow(q, k64);
            let b = inv_q_pow(q, k64 + 1);
            Transition {
                down: BigRational::one() - &a,
                stay: a - &b,
                up: b,
            }
        }
        ChainKind::Alternating => {
            let a = inv_q_pow(q, k64);
            Transition {
                down: BigRational::one() - &a,
                stay: zero(),
                up: a,
            }
        }
        ChainKind::IidColumn { n } => {
            if k >= n {
                return Transition {
                    down: zero(),
                    stay: BigRational::one(),
                    up: zero(),
                };
            }
            // a uniform column lies in an l-dimensional span w.p. q^{l-n}
            let stay = inv_q_pow(q, (n - k) as u64);
            Transition {
                down: zero(),
                up: BigRational::one() - &stay,
                stay,
            }
        }
    }
}

/// Law of the final corank when a fixed symmetric or alternating corner of
/// corank `x0` is extended by `added_steps` uniform exposures.
pub fn planted_pmf(kind: ChainKind, f: &Field, x0: usize, added_steps: usize) -> Result<CorankPmf> {
    if matches!(kind, ChainKind::IidColumn { .. }) {
        return Err(Error::InvalidSpec("planted corners are symmetric or alternating".into()));
    }
    let spec = ChainSpec::new(kind, f)?;
    Ok(spec
        .evolve(&CorankPmf::point(f.q(), x0), added_steps)?
        .with_param("x0", x0))
}

/// `1 - 3^s / q^{s - m0}`, the lower bound on hitting zero within `s` steps
/// from corank `m0 < s`.
pub fn hit_zero_bound(q: u32, m0: usize, s: usize) -> BigRational {
    assert!(m0 < s, "need m0 < s");
    let three = BigRational::from_integer(Pow::pow(BigInt::from(3), s as u64));
    BigRational::one() - three * inv_q_pow(q, (s - m0) as u64)
}

/// `3^{n/2} / q^{n/2 - m0}`, the distance bound for an n x n matrix with a
/// planted corner of corank `m0` (n even, `m0 < n/2`).
pub fn planted_bound(q: u32, n: usize, m0: usize) -> BigRational {
    assert!(n.is_multiple_of(2) && m0 < n / 2, "need n even and m0 < n/2");
    let half = (n / 2) as u64;
    BigRational::from_integer(Pow::pow(BigInt::from(3), half)) * inv_q_pow(q, half - m0 as u64)
}

/// `(1/q)^{ceil((steps - x0)/2)}`, the bound on any positive path.
pub fn positive_path_bound(q: u32, x0: usize, steps: usize) -> BigRational {
    let e = steps.saturating_sub(x0).div_ceil(2) as u64;
    inv_q_pow(q, e)
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
    fn transition_examples() {
        let t = transition(ChainKind::Symmetric, 0, &field(2));
        assert_eq!((t.down, t.stay, t.up), (r(0, 1), r(1, 2), r(1, 2)));
        let t = transition(ChainKind::Symmetric, 1, &field(3));
        assert_eq!((t.down, t.stay, t.up), (r(2, 3), r(2, 9), r(1, 9)));
        for q in [3u64, 5, 7] {
            let t = transition(ChainKind::Alternating, 0, &field(q));
            assert_eq!((t.down, t.stay, t.up), (r(0, 1), r(0, 1), r(1, 1)));
        }
        let t = transition(ChainKind::IidColumn { n: 3 }, 1, &field(2));
        assert_eq!((t.down, t.stay, t.up), (r(0, 1), r(1, 4), r(3, 4)));
    }

    #[test]
    fn transitions_sum_to_one() {
        for q in [2u64, 3, 5, 7] {
            let f = field(q);
            for k in 0..=50 {
                assert_eq!(transition(ChainKind::Symmetric, k, &f).total(), r(1, 1));
                assert_eq!(transition(ChainKind::IidColumn { n: 30 }, k, &f).total(), r(1, 1));
                if q % 2 == 1 {
                    assert_eq!(transition(ChainKind::Alternating, k, &f).total(), r(1, 1));
                }
            }
        }
    }

    #[test]
    fn iid_column_two_by_two() {
        let f = field(2);
        let spec = ChainSpec::iid_column(2, &f);
        let dims = spec.evolve(&CorankPmf::point(2, 0), 2).unwrap();
        let corank = spec.to_corank(&dims);
        let masses: Vec<_> = (0..=2).map(|k| corank.exact_mass(k).unwrap()).collect();
        assert_eq!(masses, vec![r(6, 16), r(9, 16), r(1, 16)]);
    }

    #[test]
    fn cap_enforced() {
        let f = field(3);
        let spec = ChainSpec::symmetric(&f).with_cap(2);
        assert_eq!(
            spec.evolve(&CorankPmf::point(3, 0), 3).unwrap_err(),
            Error::CapExceeded { cap: 2 }
        );
        assert!(spec.evolve(&CorankPmf::point(3, 3), 1).is_err());
        assert!(ChainSpec::alternating(&field(4)).is_err());
    }

    #[test]
    fn hit_zero_trivial_cases() {
        let f = field(5);
        let alt = ChainSpec::alternating(&f).unwrap();
        assert_eq!(alt.hit_zero_prob(0, 3), r(1, 1));
        assert_eq!(alt.hit_zero_prob(4, 3), r(0, 1));
        // one step from corank 1 hits zero exactly with the down probability
        assert_eq!(alt.hit_zero_prob(1, 1), r(4, 5));
        let sym = ChainSpec::symmetric(&f);
        assert!(sym.hit_zero_prob(2, 10) >= hit_zero_bound(5, 2, 10));
    }

    #[test]
    fn hit_zero_monotone() {
        let f = field(3);
        let sym = ChainSpec::symmetric(&f);
        for steps in 0..8 {
            for x0 in 0..5 {
                let p = sym.hit_zero_prob(x0, steps);
                assert!(p >= sym.hit_zero_prob(x0 + 1, steps));
                assert!(p <= sym.hit_zero_prob(x0, steps + 1));
            }
        }
    }

    #[test]
    fn most_likely_path_examples() {
        let sym = ChainSpec::symmetric(&field(2));
        let (path, p) = sym.most_likely_positive_path(1, 2).unwrap();
        assert_eq!(path, vec![1, 2, 1]);
        assert_eq!(p, r(3, 16));
        assert_eq!(sym.max_positive_path_exhaustive(1, 2).unwrap().1, r(3, 16));
        let alt = ChainSpec::alternating(&field(3)).unwrap();
        assert_eq!(alt.most_likely_positive_path(2, 3).unwrap().0, vec![2, 1, 2, 1]);
    }

    #[test]
    fn trailing_stay_beats_final_up() {
        let sym = ChainSpec::symmetric(&field(3));
        let (path, p) = sym.most_likely_positive_path(1, 1).unwrap();
        assert_eq!(path, vec![1, 1]);
        assert_eq!(p, r(2, 9));
        assert_eq!(sym.max_positive_path_exhaustive(1, 1).unwrap().1, p);
    }

    #[test]
    fn planted_zero_is_uniform() {
        let f = field(3);
        let p = planted_pmf(ChainKind::Symmetric, &f, 0, 5).unwrap();
        assert!(p.exact_eq(&crate::distributions::uniform_sym_pmf(5, &f)));
        let a = planted_pmf(ChainKind::Alternating, &f, 3, 4).unwrap();
        assert!(a.support().iter().all(|(k, _)| k % 2 == 1));
    }

    #[test]
    fn bounds() {
        assert_eq!(planted_bound(7, 40, 4), BigRational::new(Pow::pow(BigInt::from(3), 20u32), Pow::pow(BigInt::from(7), 16u32)));
        assert_eq!(positive_path_bound(2, 1, 4), r(1, 4));
        assert_eq!(hit_zero_bound(5, 2, 10), r(1, 1) - BigRational::new(Pow::pow(BigInt::from(3), 10u32), Pow::pow(BigInt::from(5), 8u32)));
    }
}
