use std::fmt;

use super::field::{Elem, Field};
use crate::error::{Error, Result};

/// A dense row-major matrix over F_q.
///
/// The matrix does not carry its field; every arithmetic operation takes a
/// `&Field`, and entries are assumed to be valid for it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl FqMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: &[Vec<Elem>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("column length".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// The block with rows `0..rows` and columns `0..cols`.
    pub fn top_left(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            out.data[i * cols..(i + 1) * cols].copy_from_slice(&self.row(i)[..cols]);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `M^T = -M` with zero diagonal.
    pub fn is_alternating(&self, f: &Field) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i) == 0 && (0..i).all(|j| self.get(i, j) == f.neg(self.get(j, i)))
            })
    }

    pub fn sub(&self, other: &Self, f: &Field) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix subtraction".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Elem], f: &Field) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector product".into()));
        }
        Ok((0..self.rows).map(|i| f.dot(self.row(i), x)).collect())
    }

    /// Reduced row echelon form and the pivot columns.
    ///
    /// Pivots are taken as the first nonzero entry found scanning columns left
    /// to right.
    pub fn rref(&self, f: &Field) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(f, true);
        (m, pivots)
    }

    /// Row-reduce in place; returns pivot columns. Without `reduce_above` this
    /// stops at row echelon form, which is enough for rank.
    fn eliminate(&mut self, f: &Field, reduce_above: bool) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            f.scale(&mut self.data[r * cols + c..(r + 1) * cols], inv);
            let (head, tail) = self.data.split_at_mut(r * cols);
            let (pivot_row, below) = tail.split_at_mut(cols);
            let pivot_row = &pivot_row[c..];
            for row in below.chunks_exact_mut(cols) {
                let factor = row[c];
                f.sub_scaled(&mut row[c..], pivot_row, factor);
            }
            if reduce_above {
                for row in head.chunks_exact_mut(cols) {
                    let factor = row[c];
                    f.sub_scaled(&mut row[c..], pivot_row, factor);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().eliminate(f, false).len()
    }

    /// `rows - rank`; for square matrices this is the corank.
    pub fn corank(&self, f: &Field) -> usize {
        self.rows - self.rank(f)
    }

    /// Basis of `{x : M x = 0}`.
    pub fn right_nullspace(&self, f: &Field) -> Vec<Vec<Elem>> {
        let (r, pivots) = self.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.cols];
                v[free] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, free));
                }
                v
            })
            .collect()
    }

    /// Basis of `{w : w^T M = 0}`; its size is `rows - rank`.
    pub fn left_nullspace(&self, f: &Field) -> Vec<Vec<Elem>> {
        self.transpose().right_nullspace(f)
    }

    /// Whether `x` lies in the column span.
    pub fn in_span(&self, x: &[Elem], f: &Field) -> Result<bool> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut basis = SpanBasis::new(self.rows);
        for j in 0..self.cols {
            basis.insert(&self.column(j), f);
        }
        Ok(basis.contains(x, f))
    }

    /// Parse the fixture text format: a header line `q rows cols` followed by
    /// row-major whitespace-separated entries.
    pub fn parse_text(text: &str) -> Result<(u32, Self)> {
        let mut tokens = text.split_whitespace().map(|t| {
            t.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad token {t:?}: {e}")))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .unwrap_or_else(|| Err(Error::Parse(format!("missing {what}"))))
        };
        let q = next("q")?;
        let rows = next("rows")? as usize;
        let cols = next("cols")? as usize;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let v = next("entry")?;
            if v >= q {
                return Err(Error::Parse(format!("entry {v} out of range for q = {q}")));
            }
            data.push(v as Elem);
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing entries".into()));
        }
        Ok((q as u32, Self::new(rows, cols, data)?))
    }

    pub fn to_text(&self, q: u32) -> String {
        let mut out = format!("{q} {} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// An incrementally maintained echelon basis of a subspace of F_q^n.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    dim: usize,
    vectors: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Dimension of the spanned subspace.
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, x: &mut [Elem], f: &Field) {
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            let c = x[p];
            f.sub_scaled(x, b, c);
        }
    }

    pub fn contains(&self, x: &[Elem], f: &Field) -> bool {
        let mut x = x.to_vec();
        self.reduce(&mut x, f);
        x.iter().all(|&v| v == 0)
    }

    /// Add `x` to the spanning set; returns whether the span grew.
    pub fn insert(&mut self, x: &[Elem], f: &Field) -> bool {
        assert_eq!(x.len(), self.dim);
        let mut x = x.to_vec();
        self.reduce(&mut x, f);
        match x.iter().position(|&v| v != 0) {
            Some(p) => {
                let inv = f.inv(x[p]);
                f.scale(&mut x, inv);
                self.vectors.push(x);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    /// Rank as the size of the largest nonsingular minor, with determinants by
    /// cofactor expansion. Independent of elimination.
    fn rank_by_minors(m: &FqMatrix, f: &Field) -> usize {
        fn det(m: &[Vec<Elem>], f: &Field) -> Elem {
            let n = m.len();
            if n == 0 {
                return 1;
            }
            let mut acc = 0;
            for j in 0..n {
                let minor: Vec<Vec<Elem>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let term = f.mul(m[0][j], det(&minor, f));
                acc = if j % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<Elem>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| m.get(i, j)).collect()).collect();
                    if det(&sub, f) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rank_basics() {
        let f2 = f(2);
        assert_eq!(FqMatrix::identity(5).rank(&f2), 5);
        let ones = FqMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(ones.rank(&f2), 1);
        assert_eq!(FqMatrix::zeros(3, 4).rank(&f2), 0);
    }

    #[test]
    fn rank_matches_minor_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q in [3u64, 4, 5] {
            let fq = f(q);
            for _ in 0..40 {
                // bias towards low rank so every rank value shows up
                let r = rng.random_range(0..=5);
                let a = FqMatrix::new(5, r, (0..5 * r).map(|_| rng.random_range(0..q as u32)).collect()).unwrap();
                let b = FqMatrix::new(r, 5, (0..5 * r).map(|_| rng.random_range(0..q as u32)).collect()).unwrap();
                let m = if r == 0 { FqMatrix::zeros(5, 5) } else { a.mul(&b, &fq).unwrap() };
                assert_eq!(m.rank(&fq), rank_by_minors(&m, &fq));
            }
        }
    }

    #[test]
    fn nullspaces() {
        let f2 = f(2);
        assert!(FqMatrix::identity(4).left_nullspace(&f2).is_empty());
        assert_eq!(FqMatrix::zeros(3, 3).left_nullspace(&f2).len(), 3);
        let ones = FqMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        // enumeration of F_2^2: only (1,1) is a nonzero left null vector
        assert_eq!(ones.left_nullspace(&f2), vec![vec![1, 1]]);
    }

    #[test]
    fn span_membership() {
        let f5 = f(5);
        let w = FqMatrix::from_columns(2, &[vec![1, 2]]).unwrap();
        assert!(w.in_span(&[2, 4], &f5).unwrap());
        assert!(!w.in_span(&[1, 0], &f5).unwrap());
        assert!(w.in_span(&[0, 0], &f5).unwrap());
        assert!(FqMatrix::identity(3).in_span(&[4, 1, 3], &f5).unwrap());
        assert!(matches!(w.in_span(&[1], &f5), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn text_format() {
        let (q, m) = FqMatrix::parse_text("5 2 3\n1 2 3\n4 0 1\n").unwrap();
        assert_eq!(q, 5);
        assert_eq!(m.row(1), &[4, 0, 1]);
        assert_eq!(FqMatrix::parse_text(&m.to_text(5)).unwrap(), (5, m));
        assert!(FqMatrix::parse_text("2 1 1\n2\n").is_err());
        assert!(FqMatrix::parse_text("2 1 2\n1\n").is_err());
    }

    #[test]
    fn validators() {
        let f3 = f(3);
        let a = FqMatrix::from_rows(&[vec![0, 1], vec![2, 0]]).unwrap();
        assert!(a.is_alternating(&f3));
        assert!(!a.is_symmetric());
        let s = FqMatrix::from_rows(&[vec![1, 2], vec![2, 0]]).unwrap();
        assert!(s.is_symmetric());
        assert!(!s.is_alternating(&f3));
    }

    fn arb_matrix(q: u32) -> impl Strategy<Value = FqMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(0..q, r * c).prop_map(move |d| FqMatrix::new(r, c, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rank_invariants(m in arb_matrix(9), perm_seed in any::<u64>(), scale in 1u32..9) {
            let f9 = f(9);
            let r = m.rank(&f9);
            prop_assert_eq!(r, m.transpose().rank(&f9));
            prop_assert_eq!(m.left_nullspace(&f9).len() + r, m.rows());
            prop_assert!(r <= m.rows().min(m.cols()));
            // permute and scale rows
            let mut rows: Vec<Vec<Elem>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
            let k = (perm_seed as usize) % rows.len();
            rows.rotate_left(k);
            for x in rows[0].iter_mut() {
                *x = f9.mul(*x, scale);
            }
            prop_assert_eq!(FqMatrix::from_rows(&rows).unwrap().rank(&f9), r);
        }

        #[test]
        fn nullspace_vectors_annihilate(m in arb_matrix(5)) {
            let f5 = f(5);
            for w in m.left_nullspace(&f5) {
                let prod = m.transpose().mul_vec(&w, &f5).unwrap();
                prop_assert!(prod.iter().all(|&v| v == 0));
            }
        }
    }
}
