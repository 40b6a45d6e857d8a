use std::collections::BTreeMap;
use std::fmt;

use bigdecimal::{BigDecimal, RoundingMode, Zero};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};

/// Significant digits kept for decimal masses.
pub const DECIMAL_DIGITS: u64 = 60;

/// Convert an exact rational to a decimal, rounding toward zero.
pub fn rational_to_decimal(r: &BigRational) -> BigDecimal {
    let num = BigDecimal::from(r.numer().clone());
    let den = BigDecimal::from(r.denom().clone());
    // bigdecimal's division keeps 100 digits, then we round down to ours
    (num / den).with_precision_round(
        std::num::NonZeroU64::new(DECIMAL_DIGITS).unwrap(),
        RoundingMode::Down,
    )
}

pub(crate) fn round_down(d: BigDecimal) -> BigDecimal {
    d.with_precision_round(
        std::num::NonZeroU64::new(DECIMAL_DIGITS).unwrap(),
        RoundingMode::Down,
    )
}

pub(crate) fn round_up(d: BigDecimal) -> BigDecimal {
    d.with_precision_round(
        std::num::NonZeroU64::new(DECIMAL_DIGITS).unwrap(),
        RoundingMode::Up,
    )
}

/// A probability mass, either exact or a decimal approximation from below.
#[derive(Debug, Clone, PartialEq)]
pub enum Mass {
    Exact(BigRational),
    Decimal(BigDecimal),
}

impl Mass {
    pub fn to_decimal(&self) -> BigDecimal {
        match self {
            Mass::Exact(r) => rational_to_decimal(r),
            Mass::Decimal(d) => d.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Mass::Decimal(d) => d.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Mass::Exact(r) => Some(r),
            Mass::Decimal(_) => None,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Mass::Exact(r) => r.is_zero(),
            Mass::Decimal(d) => d.is_zero(),
        }
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Mass::Decimal(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfKind {
    /// Exact finite-n law.
    Exact,
    /// A limiting law cut off at finite support.
    TruncatedLimit,
    /// Frequencies from sampling.
    Empirical,
}

impl PmfKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PmfKind::Exact => "exact",
            PmfKind::TruncatedLimit => "truncated-limit",
            PmfKind::Empirical => "empirical",
        }
    }
}

/// A probability mass function over corank values.
///
/// Zero masses are not stored; the support is sorted and duplicate-free.
/// `tail_bound` bounds the total mass missing from `support` (zero for exact
/// laws), including the downward rounding of decimal masses.
#[derive(Debug, Clone)]
pub struct CorankPmf {
    kind: PmfKind,
    q: u32,
    params: BTreeMap<String, Value>,
    support: Vec<(usize, Mass)>,
    tail_bound: BigDecimal,
}

impl CorankPmf {
    /// Exact law from masses indexed by corank.
    pub fn exact(q: u32, masses: Vec<BigRational>) -> Self {
        let support = masses
            .into_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(k, m)| (k, Mass::Exact(m)))
            .collect();
        Self {
            kind: PmfKind::Exact,
            q,
            params: BTreeMap::new(),
            support,
            tail_bound: BigDecimal::zero(),
        }
    }

    /// Exact law from a sparse map corank -> mass.
    pub fn exact_sparse(q: u32, masses: BTreeMap<usize, BigRational>) -> Self {
        let support = masses
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(k, m)| (k, Mass::Exact(m)))
            .collect();
        Self {
            kind: PmfKind::Exact,
            q,
            params: BTreeMap::new(),
            support,
            tail_bound: BigDecimal::zero(),
        }
    }

    pub fn point(q: u32, corank: usize) -> Self {
        let mut masses = vec![BigRational::zero(); corank + 1];
        masses[corank] = BigRational::one();
        Self::exact(q, masses)
    }

    /// Empirical law from counts indexed by corank.
    pub fn empirical(q: u32, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let masses = counts
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(total.max(1))))
            .collect();
        Self {
            kind: PmfKind::Empirical,
            ..Self::exact(q, masses)
        }
    }

    pub(crate) fn truncated(q: u32, support: Vec<(usize, BigDecimal)>, tail_bound: BigDecimal) -> Self {
        Self {
            kind: PmfKind::TruncatedLimit,
            q,
            params: BTreeMap::new(),
            support: support
                .into_iter()
                .map(|(k, m)| (k, Mass::Decimal(m)))
                .filter(|(_, m)| !m.is_zero())
                .collect(),
            tail_bound,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn kind(&self) -> PmfKind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn params(&self) -> &BTreeMap<String, Value> {
        &self.params
    }

    pub fn support(&self) -> &[(usize, Mass)] {
        &self.support
    }

    pub fn tail_bound(&self) -> &BigDecimal {
        &self.tail_bound
    }

    pub fn max_corank(&self) -> Option<usize> {
        self.support.last().map(|(k, _)| *k)
    }

    pub fn mass(&self, k: usize) -> Option<&Mass> {
        self.support
            .binary_search_by_key(&k, |(c, _)| *c)
            .ok()
            .map(|i| &self.support[i].1)
    }

    /// Exact mass at `k`; zero off the support. `None` for decimal laws.
    pub fn exact_mass(&self, k: usize) -> Option<BigRational> {
        match self.mass(k) {
            None => Some(BigRational::zero()),
            Some(m) => m.as_exact().cloned(),
        }
    }

    pub fn decimal_mass(&self, k: usize) -> BigDecimal {
        self.mass(k).map_or_else(BigDecimal::zero, Mass::to_decimal)
    }

    pub fn f64_mass(&self, k: usize) -> f64 {
        self.mass(k).map_or(0.0, Mass::to_f64)
    }

    pub fn is_exact(&self) -> bool {
        self.support.iter().all(|(_, m)| m.as_exact().is_some())
    }

    /// Exact sum of masses, when every mass is exact.
    pub fn exact_total(&self) -> Option<BigRational> {
        self.support
            .iter()
            .map(|(_, m)| m.as_exact().cloned())
            .sum()
    }

    pub fn decimal_total(&self) -> BigDecimal {
        self.support.iter().map(|(_, m)| m.to_decimal()).sum()
    }

    /// Equality of the exact masses; false if either law has decimal masses.
    pub fn exact_eq(&self, other: &Self) -> bool {
        self.is_exact()
            && other.is_exact()
            && self.support.len() == other.support.len()
            && self
                .support
                .iter()
                .zip(&other.support)
                .all(|((a, x), (b, y))| a == b && x == y)
    }

    pub fn to_json(&self) -> Value {
        let support: Vec<Value> = self
            .support
            .iter()
            .map(|(k, m)| json!([k, m.to_string()]))
            .collect();
        json!({
            "kind": self.kind.as_str(),
            "q": self.q,
            "params": self.params,
            "support": support,
            "tail_bound": self.tail_bound.to_string(),
        })
    }

    /// CSV table: `corank,mass_num,mass_den` for exact laws, `corank,decimal` otherwise.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.is_exact() {
            out.push_str("corank,mass_num,mass_den\n");
            for (k, m) in &self.support {
                let r = m.as_exact().expect("exact");
                out.push_str(&format!("{k},{},{}\n", r.numer(), r.denom()));
            }
        } else {
            out.push_str("corank,decimal\n");
            for (k, m) in &self.support {
                out.push_str(&format!("{k},{}\n", m.to_decimal()));
            }
        }
        out
    }
}

/// Total variation distance with the uncertainty contributed by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct TvDistance {
    pub value: BigDecimal,
    /// Half the summed tail bounds; the true distance lies in
    /// `[value - error, value + error]`.
    pub error: BigDecimal,
}

impl TvDistance {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn upper(&self) -> BigDecimal {
        &self.value + &self.error
    }

    pub fn lower(&self) -> BigDecimal {
        &self.value - &self.error
    }
}

/// Half the l1 distance over the union of supports.
pub fn tv_distance(a: &CorankPmf, b: &CorankPmf) -> TvDistance {
    let top = a.max_corank().unwrap_or(0).max(b.max_corank().unwrap_or(0));
    let half = BigDecimal::new(5.into(), 1);
    let error = (a.tail_bound() + b.tail_bound()) * &half;
    if let (true, true) = (a.is_exact(), b.is_exact()) {
        let sum: BigRational = (0..=top)
            .map(|k| (a.exact_mass(k).unwrap() - b.exact_mass(k).unwrap()).abs())
            .sum();
        let value = rational_to_decimal(&(sum / BigRational::from_integer(2.into())));
        return TvDistance { value, error };
    }
    let sum: BigDecimal = (0..=top)
        .map(|k| (a.decimal_mass(k) - b.decimal_mass(k)).abs())
        .sum();
    TvDistance {
        value: round_down(sum * half),
        error,
    }
}
