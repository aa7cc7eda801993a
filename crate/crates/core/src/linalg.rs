//! Exact rational linear algebra over sparse row-major matrices.
//!
//! Every routine here is deterministic: pivots are always the leftmost
//! nonzero column, and bases come out in reduced echelon form. Callers rely
//! on that to get reproducible cohomology representatives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for an integral rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("vector {index} does not lie in the ambient span")]
    NotContained { index: usize },
}

/// A sparse vector: sorted `(index, value)` pairs with no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, Rational)>,
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, (i, v)) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{v}")?;
        }
        write!(f, "; dim {}]", self.dim)
    }
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        assert!(index < dim, "unit vector index {index} out of range {dim}");
        Self { dim, entries: vec![(index, Rational::one())] }
    }

    /// Builds from arbitrary (possibly repeated, unsorted) entries; duplicates are summed.
    pub fn from_entries(dim: usize, mut raw: Vec<(usize, Rational)>) -> Self {
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Rational)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            assert!(i < dim, "index {i} out of range {dim}");
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        Self { dim, entries }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        Self { dim: values.len(), entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::from_dense(&values.iter().map(|&v| q(v)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Rational)> {
        self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    /// Index of the first nonzero entry.
    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Rational, other: &SparseVec) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = other.entries.get(b).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(self.entries[a].clone());
                a += 1;
            } else if ib < ia {
                out.push((ib, c * &other.entries[b].1));
                b += 1;
            } else {
                let v = &self.entries[a].1 + c * &other.entries[b].1;
                if !v.is_zero() {
                    out.push((ia, v));
                }
                a += 1;
                b += 1;
            }
        }
        Self { dim: self.dim, entries: out }
    }

    /// Re-embeds into a larger (or equal) ambient space by shifting indices.
    pub fn shifted(&self, offset: usize, new_dim: usize) -> Self {
        assert!(offset + self.dim <= new_dim);
        Self {
            dim: new_dim,
            entries: self.entries.iter().map(|(i, v)| (i + offset, v.clone())).collect(),
        }
    }

    /// Keeps only the coordinates listed in `positions`, renumbered in that order.
    pub fn select(&self, positions: &[usize]) -> Self {
        let raw = positions
            .iter()
            .enumerate()
            .filter_map(|(new, &old)| {
                let v = self.get(old);
                (!v.is_zero()).then_some((new, v))
            })
            .collect();
        Self { dim: positions.len(), entries: raw }
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, ib) = (self.entries[a].0, other.entries[b].0);
            if ia < ib {
                a += 1;
            } else if ib < ia {
                b += 1;
            } else {
                acc += &self.entries[a].1 * &other.entries[b].1;
                a += 1;
                b += 1;
            }
        }
        acc
    }
}

impl Add for &SparseVec {
    type Output = SparseVec;
    fn add(self, rhs: &SparseVec) -> SparseVec {
        self.axpy(&Rational::one(), rhs)
    }
}

impl Sub for &SparseVec {
    type Output = SparseVec;
    fn sub(self, rhs: &SparseVec) -> SparseVec {
        self.axpy(&-Rational::one(), rhs)
    }
}

impl Neg for &SparseVec {
    type Output = SparseVec;
    fn neg(self) -> SparseVec {
        self.scale(&-Rational::one())
    }
}

/// Sparse row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![SparseVec::zero(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| SparseVec::unit(n, i)).collect(),
        }
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        for r in &rows {
            assert_eq!(r.dim(), cols, "row length mismatch");
        }
        Self { rows: rows.len(), cols, data: rows }
    }

    /// Builds a `rows x columns.len()` matrix whose j-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut raw: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.dim(), rows, "column length mismatch");
            for (i, v) in col.entries() {
                raw[*i].push((j, v.clone()));
            }
        }
        let cols = columns.len();
        Self {
            rows,
            cols,
            // columns visited in increasing order, so each row is already sorted
            data: raw.into_iter().map(|entries| SparseVec { dim: cols, entries }).collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| SparseVec::from_dense(r)).collect())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| SparseVec::from_ints(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(j)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_columns(self.cols, &self.data)
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let entries = self
            .data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let v = r.get(j);
                (!v.is_zero()).then_some((i, v))
            })
            .collect();
        SparseVec { dim: self.rows, entries }
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.scale(c)).collect(),
        }
    }

    pub fn axpy(&self, c: &Rational, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.axpy(c, b)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let entries = self
            .data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let x = r.dot(v);
                (!x.is_zero()).then_some((i, x))
            })
            .collect();
        SparseVec { dim: self.rows, entries }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, Rational)> = Vec::new();
                for (k, a) in row.entries() {
                    for (j, b) in other.data[*k].entries() {
                        acc.push((*j, a * b));
                    }
                }
                SparseVec::from_entries(other.cols, acc)
            })
            .collect();
        Matrix { rows: self.rows, cols: other.cols, data }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&Matrix], cols: usize) -> Matrix {
        let mut data = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows: data.len(), cols, data }
    }

    /// Side-by-side concatenation of blocks with equal row counts.
    pub fn hstack(blocks: &[&Matrix], rows: usize) -> Matrix {
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let data = (0..rows)
            .map(|i| {
                let mut entries = Vec::new();
                let mut off = 0;
                for b in blocks {
                    assert_eq!(b.rows(), rows, "hstack of blocks with different row counts");
                    entries.extend(b.row(i).entries().iter().map(|(j, c)| (j + off, c.clone())));
                    off += b.cols();
                }
                SparseVec { dim: cols, entries }
            })
            .collect();
        Matrix { rows, cols, data }
    }

    /// Index of the first nonzero column together with that column.
    pub fn first_nonzero_column(&self) -> Option<(usize, SparseVec)> {
        let j = self.data.iter().filter_map(SparseVec::leading).min()?;
        Some((j, self.column(j)))
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.axpy(&Rational::one(), rhs)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.axpy(&-Rational::one(), rhs)
    }
}

/// Reduced row echelon form of a set of rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    /// Reduced rows, sorted by pivot column; each has a leading 1.
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Incremental row reducer. Rows are inserted one at a time and reduced
/// against the current pivots; `finish` back-substitutes to reduced form.
struct Reducer {
    cols: usize,
    rows: Vec<SparseVec>,
    pivot_of: Vec<Option<usize>>,
}

impl Reducer {
    fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new(), pivot_of: vec![None; cols] }
    }

    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut pos = 0;
        loop {
            let hit = v.entries()[pos..]
                .iter()
                .position(|(c, _)| self.pivot_of[*c].is_some())
                .map(|off| pos + off);
            let Some(at) = hit else { break };
            let (c, coef) = v.entries()[at].clone();
            let pivot_row = &self.rows[self.pivot_of[c].unwrap()];
            v = v.axpy(&-coef, pivot_row);
            pos = at;
        }
        v
    }

    /// Returns true if the row was independent of the rows seen so far.
    fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        match v.entries().first() {
            None => false,
            Some((c, lead)) => {
                let c = *c;
                let inv = lead.recip();
                self.pivot_of[c] = Some(self.rows.len());
                self.rows.push(v.scale(&inv));
                true
            }
        }
    }

    fn finish(self) -> Echelon {
        let mut order: Vec<(usize, SparseVec)> = self
            .rows
            .into_iter()
            .map(|r| (r.leading().unwrap(), r))
            .collect();
        order.sort_by_key(|(p, _)| *p);
        let pivots: Vec<usize> = order.iter().map(|(p, _)| *p).collect();
        let mut rows: Vec<SparseVec> = order.into_iter().map(|(_, r)| r).collect();
        for k in (0..rows.len()).rev() {
            let p = pivots[k];
            let (head, tail) = rows.split_at_mut(k);
            let pivot_row = &tail[0];
            for r in head.iter_mut() {
                let c = r.get(p);
                if !c.is_zero() {
                    *r = r.axpy(&-c, pivot_row);
                }
            }
        }
        Echelon { cols: self.cols, rows, pivots }
    }
}

/// Reduced row echelon form of the given rows (each of length `cols`).
pub fn rref(rows: impl IntoIterator<Item = SparseVec>, cols: usize) -> Echelon {
    let mut red = Reducer::new(cols);
    for r in rows {
        assert_eq!(r.dim(), cols, "row length mismatch");
        red.insert(r);
    }
    red.finish()
}

fn kernel_from_echelon(ech: &Echelon) -> Vec<SparseVec> {
    let n = ech.cols;
    let mut is_pivot = vec![false; n];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    // column f of the reduced rows, gathered once
    let mut col_entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (k, r) in ech.rows.iter().enumerate() {
        for (c, v) in r.entries() {
            if !is_pivot[*c] {
                col_entries[*c].push((k, v.clone()));
            }
        }
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut raw = vec![(f, Rational::one())];
            for (k, v) in &col_entries[f] {
                raw.push((ech.pivots[*k], -v.clone()));
            }
            SparseVec::from_entries(n, raw)
        })
        .collect()
}

/// Basis of the null space of `a`, one vector per free column, each with a
/// 1 in its free column and 0 in every other free column.
pub fn kernel_basis(a: &Matrix) -> Vec<SparseVec> {
    kernel_from_echelon(&rref(a.row_vecs().iter().cloned(), a.cols()))
}

/// Rank together with a basis of the column space: the columns of `a`
/// sitting at pivot positions of its row reduction.
pub fn image_rank(a: &Matrix) -> (usize, Vec<SparseVec>) {
    let ech = rref(a.row_vecs().iter().cloned(), a.cols());
    let basis = ech.pivots.iter().map(|&j| a.column(j)).collect();
    (ech.rank(), basis)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a.row_vecs().iter().cloned(), a.cols()).rank()
}

/// Some `x` with `a x = b`, free variables set to zero; `Ok(None)` if the
/// system is inconsistent.
pub fn solve_affine(a: &Matrix, b: &SparseVec) -> Result<Option<SparseVec>, LinalgError> {
    if b.dim() != a.rows() {
        return Err(LinalgError::DimensionMismatch { expected: a.rows(), found: b.dim() });
    }
    let n = a.cols();
    let aug_rows = a.row_vecs().iter().enumerate().map(|(i, r)| {
        let mut entries = r.entries().to_vec();
        let bi = b.get(i);
        if !bi.is_zero() {
            entries.push((n, bi));
        }
        SparseVec { dim: n + 1, entries }
    });
    let ech = rref(aug_rows, n + 1);
    if ech.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let raw = ech
        .rows
        .iter()
        .zip(&ech.pivots)
        .map(|(r, &p)| (p, r.get(n)))
        .collect();
    Ok(Some(SparseVec::from_entries(n, raw)))
}

/// Extends the independent set `u` to a basis of `span(v)`, greedily over
/// `v` in order. Returns only the added vectors.
pub fn complement_basis(u: &[SparseVec], v: &[SparseVec]) -> Result<Vec<SparseVec>, LinalgError> {
    let dim = match (u.first(), v.first()) {
        (Some(x), _) | (None, Some(x)) => x.dim(),
        (None, None) => return Ok(Vec::new()),
    };
    for x in u.iter().chain(v) {
        if x.dim() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, found: x.dim() });
        }
    }
    let mut red = Reducer::new(dim);
    for x in u {
        if !red.insert(x.clone()) {
            return Err(LinalgError::Dependent);
        }
    }
    let mut span_v = Reducer::new(dim);
    for x in v {
        span_v.insert(x.clone());
    }
    for (index, x) in u.iter().enumerate() {
        if !span_v.reduce(x.clone()).is_zero() {
            return Err(LinalgError::NotContained { index });
        }
    }
    Ok(v.iter().filter(|x| red.insert((*x).clone())).cloned().collect())
}

/// A subspace held in reduced echelon form: `basis[i]` has a 1 at
/// `keys[i]` and every other basis vector vanishes there, so coordinates
/// are read off directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SparseVec>,
    keys: Vec<usize>,
}

impl Subspace {
    pub fn from_spanning(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let ech = rref(vectors, ambient);
        Self { ambient, basis: ech.rows, keys: ech.pivots }
    }

    /// Null space of `a` in its canonical kernel basis.
    pub fn kernel(a: &Matrix) -> Self {
        let ech = rref(a.row_vecs().iter().cloned(), a.cols());
        let basis = kernel_from_echelon(&ech);
        let mut is_pivot = vec![false; a.cols()];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let keys = (0..a.cols()).filter(|&f| !is_pivot[f]).collect();
        Self { ambient: a.cols(), basis, keys }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| SparseVec::unit(ambient, i)).collect(),
            keys: (0..ambient).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn keys(&self) -> &[usize] {
        &self.keys
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn embedding(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis)
    }

    /// Coordinates of `w` in this basis, or `None` if `w` is not in the subspace.
    pub fn coordinates(&self, w: &SparseVec) -> Option<SparseVec> {
        let c = w.select(&self.keys);
        let mut back = w.clone();
        for (i, v) in c.entries() {
            back = back.axpy(&-v, &self.basis[*i]);
        }
        back.is_zero().then_some(c)
    }

    pub fn contains(&self, w: &SparseVec) -> bool {
        self.coordinates(w).is_some()
    }

    /// Matrix of `op` (ambient -> other ambient) restricted to `self` and
    /// corestricted to `target`. Errors with the offending column if the
    /// image leaves `target`.
    pub fn restrict(&self, op: &Matrix, target: &Subspace) -> Result<Matrix, usize> {
        let mut cols = Vec::with_capacity(self.dim());
        for (j, b) in self.basis.iter().enumerate() {
            let img = op.mul_vec(b);
            cols.push(target.coordinates(&img).ok_or(j)?);
        }
        Ok(Matrix::from_columns(target.dim(), &cols))
    }
}

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let r: Rational = s.parse().ok()?;
    Some(r)
}

/// Canonical string form: `"p/q"`, or `"p"` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign helper for integers.
pub fn sign_of(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(v: &SparseVec) -> Vec<Rational> {
        v.to_dense()
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&Matrix::identity(2)).is_empty());
    }

    #[test]
    fn kernel_of_zero_row() {
        let k = kernel_basis(&Matrix::zeros(1, 2));
        assert_eq!(k.len(), 2);
        assert_eq!(dense(&k[0]), vec![q(1), q(0)]);
        assert_eq!(dense(&k[1]), vec![q(0), q(1)]);
    }

    #[test]
    fn kernel_of_rank_one() {
        let k = kernel_basis(&Matrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(k.len(), 1);
        assert_eq!(dense(&k[0]), vec![q(-2), q(1)]);
    }

    #[test]
    fn ranks() {
        assert_eq!(image_rank(&Matrix::identity(3)).0, 3);
        assert_eq!(image_rank(&Matrix::zeros(3, 4)).0, 0);
        let (r, basis) = image_rank(&Matrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(r, 1);
        assert_eq!(dense(&basis[0]), vec![q(1), q(2)]);
    }

    #[test]
    fn solve_examples() {
        let b = SparseVec::from_ints(&[3, -1, 7]);
        assert_eq!(solve_affine(&Matrix::identity(3), &b).unwrap(), Some(b.clone()));
        assert_eq!(solve_affine(&Matrix::zeros(3, 3), &b).unwrap(), None);
        let x = solve_affine(&Matrix::from_ints(&[&[1, 1]]), &SparseVec::from_ints(&[2]))
            .unwrap()
            .unwrap();
        assert_eq!(dense(&x), vec![q(2), q(0)]);
        assert!(matches!(
            solve_affine(&Matrix::identity(2), &b),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let std2 = vec![SparseVec::unit(2, 0), SparseVec::unit(2, 1)];
        assert_eq!(complement_basis(&[], &std2).unwrap(), std2);
        assert!(complement_basis(&std2, &std2).unwrap().is_empty());
        let c = complement_basis(&[SparseVec::from_ints(&[1, 1])], &std2).unwrap();
        assert_eq!(c, vec![SparseVec::unit(2, 0)]);
        let dep = vec![SparseVec::from_ints(&[1, 1]), SparseVec::from_ints(&[2, 2])];
        assert_eq!(complement_basis(&dep, &std2), Err(LinalgError::Dependent));
        let out = complement_basis(&[SparseVec::unit(2, 1)], &[SparseVec::unit(2, 0)]);
        assert_eq!(out, Err(LinalgError::NotContained { index: 0 }));
    }

    #[test]
    fn subspace_coordinates() {
        let s = Subspace::from_spanning(3, vec![SparseVec::from_ints(&[1, 1, 0]), SparseVec::from_ints(&[0, 1, 1])]);
        let w = SparseVec::from_ints(&[2, 5, 3]);
        let c = s.coordinates(&w).unwrap();
        let back = s.embedding().mul_vec(&c);
        assert_eq!(back, w);
        assert!(s.coordinates(&SparseVec::from_ints(&[1, 0, 0])).is_none());
    }

    #[test]
    fn display_of_rationals() {
        assert_eq!(qf(6, 4).to_string(), "3/2");
        assert_eq!(q(-5).to_string(), "-5");
        assert_eq!(qf(-2, -4).to_string(), "1/2");
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |vals| {
                let rows: Vec<Vec<Rational>> =
                    vals.chunks(c).map(|ch| ch.iter().map(|&v| q(v)).collect()).collect();
                Matrix::from_dense(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(a in small_matrix()) {
            let k = kernel_basis(&a);
            prop_assert_eq!(image_rank(&a).0 + k.len(), a.cols());
            for v in &k {
                prop_assert!(a.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn solve_recovers_consistent_rhs(a in small_matrix(), seed in proptest::collection::vec(-3i64..4, 6)) {
            let x = SparseVec::from_ints(&seed[..a.cols()]);
            let b = a.mul_vec(&x);
            let sol = solve_affine(&a, &b).unwrap().expect("consistent");
            prop_assert_eq!(a.mul_vec(&sol), b);
        }

        #[test]
        fn deterministic_rref(a in small_matrix()) {
            let e1 = rref(a.row_vecs().iter().cloned(), a.cols());
            let e2 = rref(a.row_vecs().iter().cloned(), a.cols());
            prop_assert_eq!(e1.rows, e2.rows);
        }
    }
}
