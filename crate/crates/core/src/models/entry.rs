use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::algebra::{Elem, Field};
use crate::error::{Error, Result};

/// A law on F_q with rational probabilities `c_k = weights[k] / denom`.
///
/// Sampling draws one integer uniformly from `[0, denom)` and selects a value
/// by cumulative comparison, so the sampled law is exactly the stated one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntryDist {
    weights: Vec<u64>,
    denom: u64,
}

impl EntryDist {
    /// Law proportional to `weights`, one weight per field element.
    pub fn from_weights(weights: Vec<u64>) -> Result<Self> {
        let denom = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| Error::InvalidSpec("weights overflow".into()))?;
        if denom == 0 {
            return Err(Error::EmptySupport);
        }
        Ok(Self { weights, denom })
    }

    /// Law from rational probabilities; they must sum to exactly 1.
    pub fn from_probs(probs: &[BigRational]) -> Result<Self> {
        if probs.iter().any(|p| *p < BigRational::from_integer(0.into())) {
            return Err(Error::InvalidSpec("negative probability".into()));
        }
        let total: BigRational = probs.iter().cloned().sum();
        if total != BigRational::from_integer(1.into()) {
            return Err(Error::InvalidSpec(format!("probabilities sum to {total}")));
        }
        let lcm = probs
            .iter()
            .fold(BigInt::from(1), |acc, p| num_integer_lcm(&acc, p.denom()));
        let weights = probs
            .iter()
            .map(|p| {
                let w = p * BigRational::from_integer(lcm.clone());
                u64::try_from(w.to_integer())
                    .map_err(|_| Error::InvalidSpec("common denominator too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_weights(weights)
    }

    pub fn uniform(q: u32) -> Self {
        Self {
            weights: vec![1; q as usize],
            denom: u64::from(q),
        }
    }

    /// Point mass at `value`.
    pub fn constant(q: u32, value: Elem) -> Self {
        let mut weights = vec![0; q as usize];
        weights[value as usize] = 1;
        Self { weights, denom: 1 }
    }

    /// Uniform on the complement of `zero_set`; `C = q / (q - |zero_set|)`.
    pub fn near_uniform(f: &Field, zero_set: &[Elem]) -> Result<Self> {
        let mut weights = vec![1u64; f.q() as usize];
        for &z in zero_set {
            if z >= f.q() {
                return Err(Error::InvalidSpec(format!("{z} is not in F_{}", f.q())));
            }
            weights[z as usize] = 0;
        }
        Self::from_weights(weights)
    }

    pub fn q(&self) -> u32 {
        self.weights.len() as u32
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn prob(&self, k: Elem) -> BigRational {
        BigRational::new(self.weights[k as usize].into(), self.denom.into())
    }

    pub fn prob_f64(&self, k: Elem) -> f64 {
        self.weights[k as usize] as f64 / self.denom as f64
    }

    /// The near-uniform constant `C = q * max_k c_k`.
    pub fn near_uniform_constant(&self) -> f64 {
        let max = *self.weights.iter().max().expect("nonempty");
        f64::from(self.q()) * max as f64 / self.denom as f64
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|&w| w == self.weights[0])
    }

    /// Values with positive probability.
    pub fn support(&self) -> impl Iterator<Item = Elem> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(k, _)| k as Elem)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        let mut u = rng.random_range(0..self.denom);
        for (k, &w) in self.weights.iter().enumerate() {
            if u < w {
                return k as Elem;
            }
            u -= w;
        }
        unreachable!("weights sum to denom")
    }

    /// Law of `x - x'` for independent copies `x, x'`.
    pub fn difference(&self, f: &Field) -> Result<Self> {
        let mut weights = vec![0u64; self.weights.len()];
        for a in self.support() {
            for b in self.support() {
                let w = self.weights[a as usize]
                    .checked_mul(self.weights[b as usize])
                    .ok_or_else(|| Error::InvalidSpec("difference weights overflow".into()))?;
                weights[f.sub(a, b) as usize] += w;
            }
        }
        Self::from_weights(weights)
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}
