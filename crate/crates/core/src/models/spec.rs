use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::entry::EntryDist;
use crate::algebra::{Elem, Field, FqMatrix};
use crate::error::{Error, Result};

/// The matrix ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// n x n, independent entries.
    IidSquare,
    /// n x (n + m), independent entries.
    IidRect,
    /// Independent entries on and above the diagonal, mirrored below.
    Symmetric,
    /// Independent entries above the diagonal, zero diagonal, negated below.
    Alternating,
    /// Uniform on GL_n(F_q).
    UniformGl,
    /// `A - I` with `A` uniform on GL_n(F_q).
    GlMinusIdentity,
    /// Top-left n' x n' block of a uniform element of GL_n(F_q).
    GlCorner,
    /// A fixed symmetric corner extended by symmetric exposures.
    PlantedSymmetric,
    /// A fixed alternating corner extended by alternating exposures.
    PlantedAlternating,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::IidSquare,
        ModelKind::IidRect,
        ModelKind::Symmetric,
        ModelKind::Alternating,
        ModelKind::UniformGl,
        ModelKind::GlMinusIdentity,
        ModelKind::GlCorner,
        ModelKind::PlantedSymmetric,
        ModelKind::PlantedAlternating,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::IidSquare => "iid-square",
            ModelKind::IidRect => "iid-rect",
            ModelKind::Symmetric => "symmetric",
            ModelKind::Alternating => "alternating",
            ModelKind::UniformGl => "uniform-gl",
            ModelKind::GlMinusIdentity => "gl-minus-identity",
            ModelKind::GlCorner => "gl-corner",
            ModelKind::PlantedSymmetric => "planted-symmetric",
            ModelKind::PlantedAlternating => "planted-alternating",
        }
    }

    pub fn is_symmetric_class(self) -> bool {
        matches!(self, ModelKind::Symmetric | ModelKind::PlantedSymmetric)
    }

    pub fn is_alternating_class(self) -> bool {
        matches!(self, ModelKind::Alternating | ModelKind::PlantedAlternating)
    }

    pub fn is_gl(self) -> bool {
        matches!(
            self,
            ModelKind::UniformGl | ModelKind::GlMinusIdentity | ModelKind::GlCorner
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown model kind {s:?}")))
    }
}

/// Index sets of entries that are not near-uniform.
///
/// `sets[j]` maps row indices of column j to the constant held there; for the
/// symmetric classes membership must be symmetric (`i in F_j` iff `j in F_i`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeFSpec {
    sets: Vec<BTreeMap<usize, Elem>>,
}

impl TypeFSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sets with given fixed values.
    pub fn new(sets: Vec<BTreeMap<usize, Elem>>) -> Self {
        Self { sets }
    }

    /// Sets with every fixed value zero.
    pub fn zeros(sets: Vec<Vec<usize>>) -> Self {
        Self {
            sets: sets
                .into_iter()
                .map(|s| s.into_iter().map(|i| (i, 0)).collect())
                .collect(),
        }
    }

    /// `F_j = {j, ..., j + floor(alpha n)}` clipped to `[0, rows)`, fixed zeros.
    pub fn band(n: usize, columns: usize, alpha: f64) -> Self {
        let width = (alpha * n as f64).floor() as usize;
        Self::zeros(
            (0..columns)
                .map(|j| (j..=j + width).filter(|&i| i < n).collect())
                .collect(),
        )
    }

    /// `F_j = {i : |i - j| <= floor(alpha n)}`, fixed zeros; symmetric membership.
    pub fn symmetric_band(n: usize, alpha: f64) -> Self {
        let width = (alpha * n as f64).floor() as usize;
        Self::zeros(
            (0..n)
                .map(|j| (j.saturating_sub(width)..=j + width).filter(|&i| i < n).collect())
                .collect(),
        )
    }

    pub fn sets(&self) -> &[BTreeMap<usize, Elem>] {
        &self.sets
    }

    pub fn set(&self, column: usize) -> Option<&BTreeMap<usize, Elem>> {
        self.sets.get(column)
    }

    /// The fixed value at `(row, column)`, if that entry is in `F_column`.
    pub fn fixed(&self, row: usize, column: usize) -> Option<Elem> {
        self.sets.get(column).and_then(|s| s.get(&row).copied())
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(BTreeMap::is_empty)
    }

    pub fn is_symmetric(&self) -> bool {
        self.sets.iter().enumerate().all(|(j, s)| {
            s.iter()
                .all(|(&i, &v)| self.fixed(j, i).is_some_and(|w| w == v || i == j))
        })
    }
}

/// Independent entry laws: a default plus per-position overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryLaw {
    pub default: EntryDist,
    pub overrides: HashMap<(usize, usize), EntryDist>,
}

impl EntryLaw {
    pub fn shared(default: EntryDist) -> Self {
        Self {
            default,
            overrides: HashMap::new(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &EntryDist {
        self.overrides.get(&(i, j)).unwrap_or(&self.default)
    }
}

/// A declarative description of one random matrix ensemble.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub field: Field,
    pub n: usize,
    /// Extra columns for [`ModelKind::IidRect`].
    pub m: usize,
    /// Corner size for [`ModelKind::GlCorner`].
    pub n_prime: usize,
    pub entries: EntryLaw,
    pub type_f: TypeFSpec,
    /// Fixed upper-left corner for the planted kinds.
    pub planted: Option<FqMatrix>,
}

impl ModelSpec {
    /// Uniform entries, no fixed positions.
    pub fn uniform(kind: ModelKind, field: &Field, n: usize) -> Self {
        Self {
            kind,
            field: field.clone(),
            n,
            m: 0,
            n_prime: 0,
            entries: EntryLaw::shared(EntryDist::uniform(field.q())),
            type_f: TypeFSpec::empty(),
            planted: None,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_n_prime(mut self, n_prime: usize) -> Self {
        self.n_prime = n_prime;
        self
    }

    pub fn with_entries(mut self, default: EntryDist) -> Self {
        self.entries = EntryLaw::shared(default);
        self
    }

    pub fn with_type_f(mut self, type_f: TypeFSpec) -> Self {
        self.type_f = type_f;
        self
    }

    pub fn with_planted(mut self, corner: FqMatrix) -> Self {
        self.planted = Some(corner);
        self
    }

    /// Shape of sampled matrices.
    pub fn shape(&self) -> (usize, usize) {
        match self.kind {
            ModelKind::IidRect => (self.n, self.n + self.m),
            ModelKind::GlCorner => (self.n_prime, self.n_prime),
            _ => (self.n, self.n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.field.q();
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.kind.is_alternating_class() && q.is_multiple_of(2) {
            return bad(format!("alternating ensembles require odd q, got {q}"));
        }
        if self.kind == ModelKind::GlCorner && (self.n_prime == 0 || self.n_prime > self.n) {
            return bad(format!("corner size {} must lie in [1, n]", self.n_prime));
        }
        let dists = std::iter::once(&self.entries.default).chain(self.entries.overrides.values());
        for d in dists {
            if d.q() != q {
                return bad(format!("entry law has {} values for q = {q}", d.q()));
            }
        }
        let (rows, cols) = self.shape();
        for &(i, j) in self.entries.overrides.keys() {
            if i >= rows || j >= cols {
                return bad(format!("override at ({i}, {j}) outside {rows}x{cols}"));
            }
        }
        if self.type_f.sets().len() > cols {
            return bad(format!("{} index sets for {cols} columns", self.type_f.sets().len()));
        }
        for s in self.type_f.sets() {
            for (&i, &v) in s {
                if i >= rows {
                    return bad(format!("index {i} outside [0, {rows})"));
                }
                if v >= q {
                    return bad(format!("fixed value {v} outside F_{q}"));
                }
            }
        }
        if (self.kind.is_symmetric_class() || self.kind.is_alternating_class())
            && !self.type_f.is_symmetric()
        {
            return bad("index sets must satisfy i in F_j iff j in F_i".into());
        }
        if self.kind.is_alternating_class() {
            for (j, s) in self.type_f.sets().iter().enumerate() {
                if s.get(&j).is_some_and(|&v| v != 0) {
                    return bad("alternating diagonal must be zero".into());
                }
            }
        }
        match self.kind {
            ModelKind::PlantedSymmetric | ModelKind::PlantedAlternating => {
                let Some(p) = &self.planted else {
                    return bad("planted kinds need a corner matrix".into());
                };
                if !p.is_square() || p.rows() > self.n {
                    return bad(format!("planted corner {}x{} must be square with size <= n", p.rows(), p.cols()));
                }
                if p.data().iter().any(|&v| v >= q) {
                    return bad("planted entries outside the field".into());
                }
                if self.kind == ModelKind::PlantedSymmetric && !p.is_symmetric() {
                    return bad("planted corner is not symmetric".into());
                }
                if self.kind == ModelKind::PlantedAlternating && !p.is_alternating(&self.field) {
                    return bad("planted corner is not alternating".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Parse the JSON model description.
    pub fn from_json(text: &str) -> Result<(Self, Option<u64>)> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> Value {
        let dist_json = |d: &EntryDist| serde_json::json!({ "weights": d.weights() });
        let overrides: Vec<Value> = {
            let mut o: Vec<_> = self.entries.overrides.iter().collect();
            o.sort_by_key(|(k, _)| **k);
            o.into_iter()
                .map(|(&(row, col), d)| serde_json::json!({"row": row, "col": col, "dist": dist_json(d)}))
                .collect()
        };
        let f_sets: Vec<Vec<usize>> = self.type_f.sets().iter().map(|s| s.keys().copied().collect()).collect();
        let f_values: Vec<Vec<Elem>> = self.type_f.sets().iter().map(|s| s.values().copied().collect()).collect();
        serde_json::json!({
            "kind": self.kind.as_str(),
            "q": self.field.q(),
            "n": self.n,
            "m": self.m,
            "n_prime": self.n_prime,
            "entries": {"default": dist_json(&self.entries.default), "overrides": overrides},
            "F": f_sets,
            "F_values": f_values,
            "planted": self.planted.as_ref().map(|p| p.to_text(self.field.q())),
        })
    }
}

/// JSON form of an entry law.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDist {
    Named(String),
    Bare(Vec<u64>),
    Weights { weights: Vec<u64> },
    Probs { probs: Vec<String> },
    ZeroSet { zero_set: Vec<Elem> },
}

impl RawDist {
    fn build(self, f: &Field) -> Result<EntryDist> {
        let d = match self {
            RawDist::Named(name) if name == "uniform" => EntryDist::uniform(f.q()),
            RawDist::Named(name) => return Err(Error::Parse(format!("unknown law {name:?}"))),
            RawDist::Bare(weights) | RawDist::Weights { weights } => EntryDist::from_weights(weights)?,
            RawDist::Probs { probs } => {
                let parsed = probs
                    .iter()
                    .map(|s| s.parse::<BigRational>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                EntryDist::from_probs(&parsed)?
            }
            RawDist::ZeroSet { zero_set } => EntryDist::near_uniform(f, &zero_set)?,
        };
        if d.q() != f.q() {
            return Err(Error::InvalidSpec(format!("law has {} values for q = {}", d.q(), f.q())));
        }
        Ok(d)
    }
}

#[derive(Debug, Deserialize)]
struct RawOverride {
    row: usize,
    col: usize,
    dist: RawDist,
}

#[derive(Debug, Deserialize, Default)]
struct RawEntries {
    default: Option<RawDist>,
    #[serde(default)]
    overrides: Vec<RawOverride>,
}

#[derive(Debug, Deserialize)]
struct RawSpec {
    kind: ModelKind,
    q: u64,
    n: usize,
    #[serde(default)]
    m: usize,
    #[serde(default)]
    n_prime: usize,
    #[serde(default)]
    entries: RawEntries,
    #[serde(default, rename = "F")]
    f_sets: Vec<Vec<usize>>,
    #[serde(default, rename = "F_values")]
    f_values: Option<Vec<Vec<Elem>>>,
    #[serde(default)]
    planted: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

impl RawSpec {
    fn into_spec(self) -> Result<(ModelSpec, Option<u64>)> {
        let field = Field::new(self.q)?;
        let default = match self.entries.default {
            Some(d) => d.build(&field)?,
            None => EntryDist::uniform(field.q()),
        };
        let mut overrides = HashMap::new();
        for o in self.entries.overrides {
            overrides.insert((o.row, o.col), o.dist.build(&field)?);
        }
        let sets = match self.f_values {
            None => self
                .f_sets
                .into_iter()
                .map(|s| s.into_iter().map(|i| (i, 0)).collect())
                .collect(),
            Some(values) => {
                if values.len() != self.f_sets.len() {
                    return Err(Error::InvalidSpec("F_values must parallel F".into()));
                }
                self.f_sets
                    .into_iter()
                    .zip(values)
                    .map(|(s, v)| {
                        if s.len() != v.len() {
                            return Err(Error::InvalidSpec("F_values must parallel F".into()));
                        }
                        Ok(s.into_iter().zip(v).collect())
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let planted = match self.planted {
            None => None,
            Some(text) => {
                let (q, m) = FqMatrix::parse_text(&text)?;
                if u64::from(q) != self.q {
                    return Err(Error::InvalidSpec(format!("planted matrix over q = {q}")));
                }
                Some(m)
            }
        };
        let spec = ModelSpec {
            kind: self.kind,
            field,
            n: self.n,
            m: self.m,
            n_prime: self.n_prime,
            entries: EntryLaw { default, overrides },
            type_f: TypeFSpec::new(sets),
            planted,
        };
        spec.validate()?;
        Ok((spec, self.seed))
    }
}

/// Which of the index-set conditions hold for a given alpha.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub alpha: f64,
    /// Columns `j` with `|F_j| >= alpha n`.
    pub oversized_sets: Vec<usize>,
    /// Rows contained in more than `(1 - 12 alpha) n` sets.
    pub overloaded_indices: Vec<usize>,
    /// Only checked for the symmetric and alternating classes.
    pub symmetric_membership: Option<bool>,
}

impl ConditionReport {
    pub fn size_condition(&self) -> bool {
        self.oversized_sets.is_empty()
    }

    pub fn membership_condition(&self) -> bool {
        self.overloaded_indices.is_empty()
    }

    pub fn all_hold(&self) -> bool {
        self.size_condition() && self.membership_condition() && self.symmetric_membership != Some(false)
    }
}

/// Check the index-set conditions the universality theorems assume. Never
/// blocks sampling.
pub fn validate_conditions(spec: &ModelSpec, alpha: f64) -> ConditionReport {
    let n = spec.n as f64;
    let oversized_sets = spec
        .type_f
        .sets()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() as f64 >= alpha * n)
        .map(|(j, _)| j)
        .collect();
    let rows = spec.shape().0;
    let mut load = vec![0usize; rows];
    for s in spec.type_f.sets() {
        for &i in s.keys() {
            if i < rows {
                load[i] += 1;
            }
        }
    }
    let cap = (1.0 - 12.0 * alpha) * n;
    let overloaded_indices = load
        .iter()
        .enumerate()
        .filter(|(_, &c)| c as f64 > cap)
        .map(|(i, _)| i)
        .collect();
    let symmetric_membership = (spec.kind.is_symmetric_class() || spec.kind.is_alternating_class())
        .then(|| spec.type_f.is_symmetric());
    ConditionReport {
        alpha,
        oversized_sets,
        overloaded_indices,
        symmetric_membership,
    }
}
