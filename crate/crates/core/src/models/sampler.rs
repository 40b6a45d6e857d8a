//! Seeded samplers.
//!
//! Randomness is counter based: every entry `(i, j)` of trial `t` under seed
//! `s` reads its own ChaCha8 stream keyed by `(s, t)`, so a sample does not
//! depend on the order in which trials run or on how many workers run them.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::spec::{ModelKind, ModelSpec};
use crate::algebra::{Elem, Field, FqMatrix, SpanBasis};

const ENTRY_DOMAIN: u64 = 0x0065_6e74_7279;
const GL_DOMAIN: u64 = 0x0067_6c63_6f6c;

/// The keyed generator for one trial; streams are selected per entry.
pub fn trial_rng(seed: u64, trial: u64, domain: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&domain.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn stream_of(i: usize, j: usize) -> u64 {
    ((i as u64) << 32) | j as u64
}

struct EntrySource {
    base: ChaCha8Rng,
}

impl EntrySource {
    fn new(seed: u64, trial: u64) -> Self {
        Self {
            base: trial_rng(seed, trial, ENTRY_DOMAIN),
        }
    }

    /// Draw entry `(i, j)` of the spec's independent part.
    fn draw(&self, spec: &ModelSpec, i: usize, j: usize) -> Elem {
        if let Some(v) = spec.type_f.fixed(i, j) {
            return v;
        }
        let mut rng = self.base.clone();
        rng.set_stream(stream_of(i, j));
        spec.entries.at(i, j).sample(&mut rng)
    }
}

/// Draw trial `trial` of the ensemble.
pub fn sample(spec: &ModelSpec, seed: u64, trial: u64) -> FqMatrix {
    let f = &spec.field;
    let n = spec.n;
    match spec.kind {
        ModelKind::IidSquare | ModelKind::IidRect => {
            let (rows, cols) = spec.shape();
            let src = EntrySource::new(seed, trial);
            let mut m = FqMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, src.draw(spec, i, j));
                }
            }
            m
        }
        ModelKind::Symmetric | ModelKind::Alternating => fill_structured(spec, None, seed, trial),
        ModelKind::PlantedSymmetric | ModelKind::PlantedAlternating => {
            fill_structured(spec, spec.planted.as_ref(), seed, trial)
        }
        ModelKind::UniformGl => sample_gl(f, n, seed, trial),
        ModelKind::GlMinusIdentity => sample_gl(f, n, seed, trial)
            .sub(&FqMatrix::identity(n), f)
            .expect("same shape"),
        ModelKind::GlCorner => {
            sample_gl(f, n, seed, trial).top_left(spec.n_prime, spec.n_prime)
        }
    }
}

/// Corank of [`sample`].
pub fn sample_corank(spec: &ModelSpec, seed: u64, trial: u64) -> usize {
    sample(spec, seed, trial).corank(&spec.field)
}

/// Symmetric or alternating fill; the entry at `(i, j)` with `i <= j` (`i < j`
/// for alternating) is drawn from the law at that position and mirrored.
fn fill_structured(spec: &ModelSpec, corner: Option<&FqMatrix>, seed: u64, trial: u64) -> FqMatrix {
    let f = &spec.field;
    let n = spec.n;
    let alternating = spec.kind.is_alternating_class();
    let c = corner.map_or(0, FqMatrix::rows);
    let src = EntrySource::new(seed, trial);
    let mut m = FqMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            if alternating && i == j {
                continue;
            }
            let v = match corner {
                Some(p) if j < c => p.get(i, j),
                _ => src.draw(spec, i, j),
            };
            m.set(i, j, v);
            m.set(j, i, if alternating { f.neg(v) } else { v });
        }
    }
    m
}

/// Uniform element of GL_n(F_q): column `j` is drawn uniformly from its own
/// stream and redrawn until it leaves the span of the previous columns.
pub fn sample_gl(f: &Field, n: usize, seed: u64, trial: u64) -> FqMatrix {
    let base = trial_rng(seed, trial, GL_DOMAIN);
    let mut basis = SpanBasis::new(n);
    let mut columns = Vec::with_capacity(n);
    let mut col = vec![0; n];
    for j in 0..n {
        let mut rng = base.clone();
        rng.set_stream(j as u64);
        loop {
            for v in col.iter_mut() {
                *v = rand::Rng::random_range(&mut rng, 0..f.q());
            }
            if basis.insert(&col, f) {
                columns.push(col.clone());
                break;
            }
        }
    }
    FqMatrix::from_columns(n, &columns).expect("n columns of length n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{EntryDist, TypeFSpec};

    fn field(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn deterministic_per_seed_and_trial() {
        let f = field(5);
        for kind in ModelKind::ALL {
            let mut spec = ModelSpec::uniform(kind, &f, 6).with_m(2).with_n_prime(3);
            if matches!(kind, ModelKind::PlantedSymmetric | ModelKind::PlantedAlternating) {
                spec = spec.with_planted(FqMatrix::zeros(2, 2));
            }
            assert_eq!(sample(&spec, 1, 7), sample(&spec, 1, 7), "{kind}");
            let distinct = (0..8).any(|t| sample(&spec, 1, t) != sample(&spec, 1, 7));
            assert!(distinct, "{kind}");
            assert_ne!(sample(&spec, 2, 7), sample(&spec, 1, 7), "{kind}");
        }
    }

    #[test]
    fn structure_of_samples() {
        let f = field(7);
        let sym = ModelSpec::uniform(ModelKind::Symmetric, &f, 9);
        let alt = ModelSpec::uniform(ModelKind::Alternating, &f, 9);
        let rect = ModelSpec::uniform(ModelKind::IidRect, &f, 4).with_m(3);
        for t in 0..20 {
            assert!(sample(&sym, 3, t).is_symmetric());
            let a = sample(&alt, 3, t);
            assert!(a.is_alternating(&f));
            assert_eq!(a.rank(&f) % 2, 0);
            let r = sample(&rect, 3, t);
            assert_eq!((r.rows(), r.cols()), (4, 7));
        }
    }

    #[test]
    fn fixed_entries_respected() {
        let f = field(3);
        let n = 5;
        let zero_diag = TypeFSpec::zeros((0..n).map(|j| vec![j]).collect());
        let spec = ModelSpec::uniform(ModelKind::Symmetric, &f, n).with_type_f(zero_diag);
        for t in 0..20 {
            let m = sample(&spec, 0, t);
            assert!((0..n).all(|i| m.get(i, i) == 0));
        }
        let constant = ModelSpec::uniform(ModelKind::IidSquare, &f, 3).with_entries(EntryDist::constant(3, 2));
        assert!(sample(&constant, 0, 0).data().iter().all(|&v| v == 2));
    }

    #[test]
    fn changing_one_law_leaves_other_entries() {
        let f = field(11);
        let a = ModelSpec::uniform(ModelKind::IidSquare, &f, 4);
        let mut b = a.clone();
        b.entries.overrides.insert((1, 2), EntryDist::constant(11, 0));
        let (x, y) = (sample(&a, 5, 1), sample(&b, 5, 1));
        for i in 0..4 {
            for j in 0..4 {
                if (i, j) != (1, 2) {
                    assert_eq!(x.get(i, j), y.get(i, j));
                }
            }
        }
    }

    #[test]
    fn gl_samples_invertible() {
        for q in [2u64, 3, 4, 7] {
            let f = field(q);
            for t in 0..30 {
                let g = sample_gl(&f, 6, 11, t);
                assert_eq!(g.rank(&f), 6);
            }
        }
        let f = field(2);
        // GL_1(F_2) has the single element 1
        assert!((0..10).all(|t| sample_gl(&f, 1, 0, t).get(0, 0) == 1));
    }

    #[test]
    fn gl_derived_kinds_consistent() {
        let f = field(5);
        let n = 7;
        let base = ModelSpec::uniform(ModelKind::UniformGl, &f, n);
        let minus = ModelSpec::uniform(ModelKind::GlMinusIdentity, &f, n);
        let corner = ModelSpec::uniform(ModelKind::GlCorner, &f, n).with_n_prime(3);
        for t in 0..10 {
            let g = sample(&base, 4, t);
            let h = sample(&minus, 4, t);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { f.sub(g.get(i, j), 1) } else { g.get(i, j) };
                    assert_eq!(h.get(i, j), expect);
                }
            }
            assert_eq!(sample(&corner, 4, t), g.top_left(3, 3));
        }
    }

    #[test]
    fn planted_corner_kept() {
        let f = field(3);
        let (_, corner) = FqMatrix::parse_text("3 3 3\n0 1 2\n2 0 1\n1 2 0").unwrap();
        assert!(corner.is_alternating(&f));
        let spec = ModelSpec::uniform(ModelKind::PlantedAlternating, &f, 6).with_planted(corner.clone());
        spec.validate().unwrap();
        for t in 0..10 {
            let m = sample(&spec, 8, t);
            assert!(m.is_alternating(&f));
            assert_eq!(m.top_left(3, 3), corner);
        }
    }
}
