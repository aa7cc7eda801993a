//! Graded vector spaces over a finite degree window, graded linear maps,
//! and tensor products of graded bases.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, Rational, SparseVec};

/// Per-degree dimensions over the window `[lo, lo + dims.len())`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    lo: i32,
    dims: Vec<usize>,
}

impl Dims {
    pub fn new(lo: i32, dims: Vec<usize>) -> Self {
        Self { lo, dims }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest degree in the window (`lo - 1` for an empty window).
    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, d: i32) -> usize {
        if d < self.lo || d > self.hi() {
            0
        } else {
            self.dims[(d - self.lo) as usize]
        }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn as_vec(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// Lowest degree carrying a nonzero dimension.
    pub fn first_nonzero(&self) -> Option<i32> {
        self.degrees().find(|&d| self.dim(d) > 0)
    }
}

/// Graded space with one label per basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    dims: Dims,
    labels: Arc<Vec<Vec<String>>>,
}

impl GradedSpace {
    pub fn new(lo: i32, labels: Vec<Vec<String>>) -> Self {
        let dims = Dims::new(lo, labels.iter().map(Vec::len).collect());
        Self { dims, labels: Arc::new(labels) }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn dim(&self, d: i32) -> usize {
        self.dims.dim(d)
    }

    pub fn lo(&self) -> i32 {
        self.dims.lo()
    }

    pub fn hi(&self) -> i32 {
        self.dims.hi()
    }

    pub fn labels(&self, d: i32) -> &[String] {
        if self.dims.dim(d) == 0 {
            return &[];
        }
        &self.labels[(d - self.dims.lo()) as usize]
    }

    pub fn label(&self, d: i32, i: usize) -> &str {
        &self.labels(d)[i]
    }

    /// Renders a vector of degree `d` as `c·label + …`.
    pub fn format(&self, d: i32, v: &SparseVec) -> String {
        crate::monomial::format_terms(
            v.entries().iter().map(|(i, c)| (c.clone(), self.label(d, *i).to_string())),
        )
    }
}

/// Homogeneous linear map of degree `shift` between two graded spaces,
/// stored as one matrix per source degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    src: Dims,
    tgt: Dims,
    shift: i32,
    blocks: Vec<Matrix>,
}

impl LinMap {
    pub fn zero(src: &Dims, tgt: &Dims, shift: i32) -> Self {
        Self::from_blocks(src, tgt, shift, |d| Matrix::zeros(tgt.dim(d + shift), src.dim(d)))
    }

    pub fn identity(space: &Dims) -> Self {
        Self::from_blocks(space, space, 0, |d| Matrix::identity(space.dim(d)))
    }

    pub fn from_blocks(src: &Dims, tgt: &Dims, shift: i32, mut f: impl FnMut(i32) -> Matrix) -> Self {
        let blocks = src
            .degrees()
            .map(|d| {
                let m = f(d);
                assert_eq!(
                    (m.rows(), m.cols()),
                    (tgt.dim(d + shift), src.dim(d)),
                    "block shape mismatch at degree {d}"
                );
                m
            })
            .collect();
        Self { src: src.clone(), tgt: tgt.clone(), shift, blocks }
    }

    /// Builds the map from the image of each basis vector. Images whose
    /// target degree lies outside the target window must be zero-dimensional.
    pub fn from_columns(
        src: &Dims,
        tgt: &Dims,
        shift: i32,
        mut col: impl FnMut(i32, usize) -> SparseVec,
    ) -> Self {
        Self::from_blocks(src, tgt, shift, |d| {
            let rows = tgt.dim(d + shift);
            let cols: Vec<SparseVec> = (0..src.dim(d))
                .map(|i| {
                    let v = col(d, i);
                    if rows == 0 {
                        SparseVec::zero(0)
                    } else {
                        v
                    }
                })
                .collect();
            Matrix::from_columns(rows, &cols)
        })
    }

    pub fn src(&self) -> &Dims {
        &self.src
    }

    pub fn tgt(&self) -> &Dims {
        &self.tgt
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    /// Matrix from degree `d` to degree `d + shift` (empty outside the window).
    pub fn block(&self, d: i32) -> Matrix {
        if d < self.src.lo() || d > self.src.hi() {
            Matrix::zeros(self.tgt.dim(d + self.shift), 0)
        } else {
            self.blocks[(d - self.src.lo()) as usize].clone()
        }
    }

    pub fn block_ref(&self, d: i32) -> Option<&Matrix> {
        if d < self.src.lo() || d > self.src.hi() {
            None
        } else {
            Some(&self.blocks[(d - self.src.lo()) as usize])
        }
    }

    pub fn apply(&self, d: i32, v: &SparseVec) -> SparseVec {
        match self.block_ref(d) {
            Some(m) => m.mul_vec(v),
            None => SparseVec::zero(self.tgt.dim(d + self.shift)),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> LinMap {
        assert_eq!(other.tgt, self.src, "composition of incompatible graded maps");
        let shift = self.shift + other.shift;
        LinMap::from_blocks(&other.src, &self.tgt, shift, |d| {
            let mid = d + other.shift;
            match (self.block_ref(mid), other.block_ref(d)) {
                (Some(a), Some(b)) => a * b,
                _ => Matrix::zeros(self.tgt.dim(d + shift), other.src.dim(d)),
            }
        })
    }

    pub fn axpy(&self, c: &Rational, other: &LinMap) -> LinMap {
        assert_eq!(
            (&self.src, &self.tgt, self.shift),
            (&other.src, &other.tgt, other.shift),
            "sum of incompatible graded maps"
        );
        LinMap {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            shift: self.shift,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.axpy(c, b)).collect(),
        }
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        self.axpy(&-Rational::one(), other)
    }

    pub fn scale(&self, c: &Rational) -> LinMap {
        LinMap {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            shift: self.shift,
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    /// First source degree and basis index where the map is nonzero.
    pub fn first_nonzero(&self) -> Option<(i32, usize, SparseVec)> {
        self.src.degrees().find_map(|d| {
            self.block_ref(d)
                .and_then(Matrix::first_nonzero_column)
                .map(|(j, col)| (d, j, col))
        })
    }

    /// Same as [`first_nonzero`](Self::first_nonzero) but only over source
    /// degrees accepted by `keep`.
    pub fn first_nonzero_where(&self, keep: impl Fn(i32) -> bool) -> Option<(i32, usize, SparseVec)> {
        self.src.degrees().filter(|&d| keep(d)).find_map(|d| {
            self.block_ref(d)
                .and_then(Matrix::first_nonzero_column)
                .map(|(j, col)| (d, j, col))
        })
    }

    /// Sum of a family of maps with coefficients.
    pub fn linear_combination<'a>(
        src: &Dims,
        tgt: &Dims,
        shift: i32,
        terms: impl IntoIterator<Item = (Rational, &'a LinMap)>,
    ) -> LinMap {
        let mut acc = LinMap::zero(src, tgt, shift);
        for (c, m) in terms {
            if !c.is_zero() {
                acc = acc.axpy(&c, m);
            }
        }
        acc
    }
}

/// Basis of `A ⊗ B` truncated to total degrees `lo..=hi`. Within a total
/// degree the blocks are ordered by the degree of the `A` factor, and
/// inside a block by `(a, b)` lexicographically.
#[derive(Clone, Debug)]
pub struct TensorBasis {
    left: Dims,
    right: Dims,
    dims: Dims,
    /// For each total degree: list of `(left degree, offset)` blocks.
    blocks: Vec<Vec<(i32, usize)>>,
}

impl TensorBasis {
    pub fn new(left: &Dims, right: &Dims, hi: i32) -> Self {
        let lo = left.lo() + right.lo();
        let mut blocks = Vec::new();
        let mut dims = Vec::new();
        for t in lo..=hi {
            let mut off = 0;
            let mut list = Vec::new();
            for p in left.degrees() {
                let n = left.dim(p) * right.dim(t - p);
                if n > 0 {
                    list.push((p, off));
                    off += n;
                }
            }
            blocks.push(list);
            dims.push(off);
        }
        Self { left: left.clone(), right: right.clone(), dims: Dims::new(lo, dims), blocks }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn left(&self) -> &Dims {
        &self.left
    }

    pub fn right(&self) -> &Dims {
        &self.right
    }

    /// Index of `a ⊗ b` (with `a` in left degree `p`, `b` in right degree
    /// `t - p`) inside total degree `t`, if within the window.
    pub fn index(&self, p: i32, a: usize, t: i32, b: usize) -> Option<usize> {
        if t < self.dims.lo() || t > self.dims.hi() {
            return None;
        }
        let list = &self.blocks[(t - self.dims.lo()) as usize];
        let (_, off) = list.iter().find(|(q, _)| *q == p)?;
        Some(off + a * self.right.dim(t - p) + b)
    }

    /// Decomposes an index of total degree `t` into `(p, a, b)`.
    pub fn split(&self, t: i32, idx: usize) -> (i32, usize, usize) {
        let list = &self.blocks[(t - self.dims.lo()) as usize];
        let pos = list.partition_point(|(_, off)| *off <= idx) - 1;
        let (p, off) = list[pos];
        let rd = self.right.dim(t - p);
        let local = idx - off;
        (p, local / rd, local % rd)
    }

    /// Iterates the basis of total degree `t` as `(p, a, b)`.
    pub fn iter_degree(&self, t: i32) -> impl Iterator<Item = (i32, usize, usize)> + '_ {
        (0..self.dims.dim(t)).map(move |i| self.split(t, i))
    }

    /// Builds an element of total degree `t` from `x ⊗ y` with `x` of
    /// left degree `p`.
    pub fn tensor_vectors(&self, p: i32, x: &SparseVec, t: i32, y: &SparseVec) -> SparseVec {
        let n = self.dims.dim(t);
        let mut raw = Vec::with_capacity(x.nnz() * y.nnz());
        for (a, ca) in x.entries() {
            for (b, cb) in y.entries() {
                if let Some(i) = self.index(p, *a, t, *b) {
                    raw.push((i, ca * cb));
                }
            }
        }
        SparseVec::from_entries(n, raw)
    }

    pub fn labels(&self, left: &GradedSpace, right: &GradedSpace) -> Vec<Vec<String>> {
        self.dims
            .degrees()
            .map(|t| {
                self.iter_degree(t)
                    .map(|(p, a, b)| format!("{}⊗{}", left.label(p, a), right.label(t - p, b)))
                    .collect()
            })
            .collect()
    }
}

/// `F ⊗ G` on a tensor basis, with `sign(p, q)` multiplying the image of
/// `a ⊗ b` for `a` of degree `p` and `b` of degree `q`. A `None` factor is the
/// identity. Images landing outside the window are dropped.
pub fn tensor_op(
    basis: &TensorBasis,
    f: Option<&LinMap>,
    g: Option<&LinMap>,
    sign: impl Fn(i32, i32) -> i64,
) -> LinMap {
    let fs = f.map_or(0, LinMap::shift);
    let gs = g.map_or(0, LinMap::shift);
    let shift = fs + gs;
    // cache blocks as columns so each is extracted once
    let col_of = |m: Option<&LinMap>, d: i32, dims: &Dims, i: usize, cache: &mut std::collections::HashMap<i32, Vec<SparseVec>>| -> SparseVec {
        match m {
            None => SparseVec::unit(dims.dim(d), i),
            Some(map) => cache.entry(d).or_insert_with(|| map.block(d).columns())[i].clone(),
        }
    };
    let mut fcache = std::collections::HashMap::new();
    let mut gcache = std::collections::HashMap::new();
    LinMap::from_columns(basis.dims(), basis.dims(), shift, |t, idx| {
        let (p, a, b) = basis.split(t, idx);
        let qd = t - p;
        let s = sign(p, qd);
        let target = t + shift;
        let n = basis.dims().dim(target);
        if s == 0 || n == 0 {
            return SparseVec::zero(n);
        }
        let x = col_of(f, p, basis.left(), a, &mut fcache);
        let y = col_of(g, qd, basis.right(), b, &mut gcache);
        let v = basis.tensor_vectors(p + fs, &x, target, &y);
        if s == 1 {
            v
        } else {
            v.scale(&crate::linalg::q(s))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn tensor_basis_indexing() {
        let a = Dims::new(0, vec![1, 2]);
        let b = Dims::new(0, vec![2, 1]);
        let t = TensorBasis::new(&a, &b, 2);
        assert_eq!(t.dims().as_vec(), vec![2, 1 + 4, 2]);
        for d in t.dims().degrees() {
            for i in 0..t.dims().dim(d) {
                let (p, x, y) = t.split(d, i);
                assert_eq!(t.index(p, x, d, y), Some(i));
            }
        }
    }

    #[test]
    fn degree_additivity() {
        let a = Dims::new(0, vec![1, 3, 3, 1]);
        let b = Dims::new(-1, vec![2, 0, 5]);
        let t = TensorBasis::new(&a, &b, a.hi() + b.hi());
        for d in t.dims().degrees() {
            let expect: usize = a.degrees().map(|p| a.dim(p) * b.dim(d - p)).sum();
            assert_eq!(t.dims().dim(d), expect);
        }
    }

    #[test]
    fn compose_and_identity() {
        let d = Dims::new(0, vec![2, 2]);
        let id = LinMap::identity(&d);
        let m = LinMap::from_blocks(&d, &d, 0, |_| Matrix::from_ints(&[&[1, 2], &[3, 4]]));
        assert_eq!(id.compose(&m), m);
        assert_eq!(m.compose(&id), m);
        assert!(m.sub(&m).is_zero());
        assert_eq!(m.scale(&q(2)).block(0).get(1, 1), q(8));
    }
}
