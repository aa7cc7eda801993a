//! Monomial bases of the exterior and symmetric algebras on `n` generators,
//! plus the derivation extensions of linear maps on generators.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::Zero;

use crate::graded::Dims;
use crate::linalg::{q, Matrix, Rational, SparseVec};
use crate::signs::sort_sign;

/// Exterior monomial `λ^{i_1}∧…∧λ^{i_p}` with `i_1 < … < i_p`, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaMonomial(pub u64);

impl LambdaMonomial {
    pub const ONE: LambdaMonomial = LambdaMonomial(0);

    pub fn from_indices(idx: &[usize]) -> Option<(LambdaMonomial, i64)> {
        let mut v = idx.to_vec();
        let s = sort_sign(&mut v);
        if s == 0 {
            return None;
        }
        Some((LambdaMonomial(v.iter().fold(0u64, |m, &i| m | (1 << i))), s))
    }

    pub fn generator(k: usize) -> LambdaMonomial {
        LambdaMonomial(1 << k)
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&k| self.contains(k)).collect()
    }

    /// `self ∧ other` as `(monomial, sign)`, or `None` if they share an index.
    pub fn wedge(self, other: LambdaMonomial) -> Option<(LambdaMonomial, i64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // each index of `other` passes over the indices of `self` above it
        let swaps: u32 = other
            .indices()
            .into_iter()
            .map(|y| (self.0 >> (y + 1)).count_ones())
            .sum();
        Some((LambdaMonomial(self.0 | other.0), if swaps.is_multiple_of(2) { 1 } else { -1 }))
    }

    /// Interior product with the k-th dual vector: deletes `λ^k` with sign
    /// `(-1)^{position}` (zero-based position).
    pub fn interior(self, k: usize) -> Option<(LambdaMonomial, i64)> {
        if !self.contains(k) {
            return None;
        }
        let below = (self.0 & ((1u64 << k) - 1)).count_ones();
        Some((LambdaMonomial(self.0 & !(1 << k)), if below.is_multiple_of(2) { 1 } else { -1 }))
    }

    pub fn label(self, names: &[String]) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        self.indices().iter().map(|&i| names[i].as_str()).join("∧")
    }
}

/// All exterior monomials on `n` generators, lexicographic within each degree.
#[derive(Clone, Debug)]
pub struct ExteriorBasis {
    n: usize,
    by_degree: Vec<Vec<LambdaMonomial>>,
    index: HashMap<LambdaMonomial, usize>,
}

impl ExteriorBasis {
    pub fn new(n: usize) -> Self {
        assert!(n < 64, "exterior algebras on more than 63 generators are not supported");
        let mut by_degree = Vec::with_capacity(n + 1);
        let mut index = HashMap::new();
        for p in 0..=n {
            let monos: Vec<LambdaMonomial> = (0..n)
                .combinations(p)
                .map(|c| LambdaMonomial::from_indices(&c).unwrap().0)
                .collect();
            for (i, m) in monos.iter().enumerate() {
                index.insert(*m, i);
            }
            by_degree.push(monos);
        }
        Self { n, by_degree, index }
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Dims {
        Dims::new(0, self.by_degree.iter().map(Vec::len).collect())
    }

    pub fn degree(&self, p: usize) -> &[LambdaMonomial] {
        self.by_degree.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, m: LambdaMonomial) -> usize {
        self.index[&m]
    }

    /// Vector in degree `m.degree()` for `sign · m`.
    pub fn vector(&self, m: LambdaMonomial, coef: Rational) -> SparseVec {
        let p = m.degree();
        SparseVec::from_entries(self.by_degree[p].len(), vec![(self.index[&m], coef)])
    }

    /// Matrix (degree p → degree p + deg(x)) of `v ↦ v ∧ x` (`right`) or
    /// `v ↦ x ∧ v`, where `x` is an element of degree `xdeg`.
    pub fn multiplication(&self, x: &SparseVec, xdeg: usize, p: usize, right: bool) -> Matrix {
        let tgt = p + xdeg;
        let rows = self.degree(tgt).len();
        let cols: Vec<SparseVec> = self
            .degree(p)
            .iter()
            .map(|&m| {
                if tgt > self.n {
                    return SparseVec::zero(0);
                }
                let mut raw = Vec::new();
                for (j, c) in x.entries() {
                    let y = self.by_degree[xdeg][*j];
                    let prod = if right { m.wedge(y) } else { y.wedge(m) };
                    if let Some((z, s)) = prod {
                        raw.push((self.index[&z], c * q(s)));
                    }
                }
                SparseVec::from_entries(rows, raw)
            })
            .collect();
        Matrix::from_columns(rows, &cols)
    }

    /// Extension of a linear map on generators (column m = image of
    /// generator m) to an even derivation of `Λ^p`.
    pub fn derivation(&self, gen: &Matrix, p: usize) -> Matrix {
        let rows = self.degree(p).len();
        let cols: Vec<SparseVec> = self
            .degree(p)
            .iter()
            .map(|&mono| {
                let idx = mono.indices();
                let mut raw = Vec::new();
                for (pos, &i) in idx.iter().enumerate() {
                    let image = gen.column(i);
                    for (j, c) in image.entries() {
                        let mut replaced = idx.clone();
                        replaced[pos] = *j;
                        if let Some((z, s)) = LambdaMonomial::from_indices(&replaced) {
                            raw.push((self.index[&z], c * q(s)));
                        }
                    }
                }
                SparseVec::from_entries(rows, raw)
            })
            .collect();
        Matrix::from_columns(rows, &cols)
    }
}

/// Symmetric monomial given by its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymMonomial(pub Vec<u32>);

impl SymMonomial {
    pub fn one(n: usize) -> Self {
        SymMonomial(vec![0; n])
    }

    pub fn generator(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        SymMonomial(e)
    }

    /// Polynomial degree `Σ e_m`; the cohomological degree is twice this.
    pub fn poly_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn times(&self, other: &SymMonomial) -> SymMonomial {
        SymMonomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn label(&self, names: &[String]) -> String {
        if self.poly_degree() == 0 {
            return "1".to_string();
        }
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
            .join("·")
    }
}

/// Symmetric monomials of polynomial degree `0..=max`, graded-lexicographic
/// within a degree (`x_1^a` first).
#[derive(Clone, Debug)]
pub struct SymBasis {
    n: usize,
    by_degree: Vec<Vec<SymMonomial>>,
    index: Vec<HashMap<SymMonomial, usize>>,
}

impl SymBasis {
    pub fn new(n: usize, max_poly_degree: usize) -> Self {
        let mut by_degree = Vec::new();
        let mut index = Vec::new();
        for a in 0..=max_poly_degree {
            let monos: Vec<SymMonomial> = (0..n)
                .combinations_with_replacement(a)
                .map(|c| {
                    let mut e = vec![0u32; n];
                    for i in c {
                        e[i] += 1;
                    }
                    SymMonomial(e)
                })
                .collect();
            let monos = if n == 0 && a == 0 { vec![SymMonomial(vec![])] } else { monos };
            index.push(monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect());
            by_degree.push(monos);
        }
        Self { n, by_degree, index }
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn max_poly_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn degree(&self, a: usize) -> &[SymMonomial] {
        self.by_degree.get(a).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, m: &SymMonomial) -> usize {
        self.index[m.poly_degree()][m]
    }

    /// Cohomologically graded dimensions: `S^a` sits in degree `2a`.
    pub fn dims(&self) -> Dims {
        let mut dims = Vec::new();
        for (a, monos) in self.by_degree.iter().enumerate() {
            dims.push(monos.len());
            if a < self.max_poly_degree() {
                dims.push(0);
            }
        }
        Dims::new(0, dims)
    }

    /// Multiplication by an element `x` of `S^b` as a map `S^a → S^{a+b}`,
    /// or `None` if the target is beyond the basis.
    pub fn multiplication(&self, x: &SparseVec, b: usize, a: usize) -> Option<Matrix> {
        let tgt = a + b;
        if tgt > self.max_poly_degree() {
            return None;
        }
        let rows = self.by_degree[tgt].len();
        let cols: Vec<SparseVec> = self.by_degree[a]
            .iter()
            .map(|m| {
                let raw = x
                    .entries()
                    .iter()
                    .map(|(j, c)| (self.index[tgt][&m.times(&self.by_degree[b][*j])], c.clone()))
                    .collect();
                SparseVec::from_entries(rows, raw)
            })
            .collect();
        Some(Matrix::from_columns(rows, &cols))
    }

    /// Derivation extension of a linear map on generators to `S^a`.
    pub fn derivation(&self, gen: &Matrix, a: usize) -> Matrix {
        let rows = self.degree(a).len();
        let cols: Vec<SparseVec> = self
            .degree(a)
            .iter()
            .map(|m| {
                let mut raw = Vec::new();
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut rest = m.clone();
                    rest.0[i] -= 1;
                    for (j, c) in gen.column(i).entries() {
                        let z = rest.times(&SymMonomial::generator(self.n, *j));
                        raw.push((self.index[a][&z], c * q(e as i64)));
                    }
                }
                SparseVec::from_entries(rows, raw)
            })
            .collect();
        Matrix::from_columns(rows, &cols)
    }

    /// Expands a vector in `S^a` into a readable polynomial.
    pub fn format(&self, v: &SparseVec, a: usize, names: &[String]) -> String {
        format_terms(v.entries().iter().map(|(i, c)| (c.clone(), self.by_degree[a][*i].label(names))))
    }
}

/// `c1·t1 + c2·t2 …` with unit coefficients elided.
pub fn format_terms(terms: impl IntoIterator<Item = (Rational, String)>) -> String {
    let mut out = String::new();
    for (c, t) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c < Rational::zero();
        let mag = if neg { -c } else { c };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let compound = t.contains(" + ") || t.contains(" - ") || t.starts_with('-');
        let t = if compound && (neg || mag != q(1) || !out.is_empty()) { format!("({t})") } else { t };
        if mag == q(1) {
            out.push_str(&t);
        } else if t == "1" {
            out.push_str(&mag.to_string());
        } else {
            out.push_str(&format!("{mag}·{t}"));
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        let a = LambdaMonomial::generator(1);
        let b = LambdaMonomial::generator(0);
        assert_eq!(a.wedge(b), Some((LambdaMonomial(0b11), -1)));
        assert_eq!(b.wedge(a), Some((LambdaMonomial(0b11), 1)));
        assert_eq!(a.wedge(a), None);
        let (ij, _) = LambdaMonomial::from_indices(&[0, 1]).unwrap();
        let k = LambdaMonomial::generator(2);
        assert_eq!(k.wedge(ij), Some((LambdaMonomial(0b111), 1)));
    }

    #[test]
    fn interior_signs() {
        let (ijk, _) = LambdaMonomial::from_indices(&[0, 1, 2]).unwrap();
        assert_eq!(ijk.interior(0), Some((LambdaMonomial(0b110), 1)));
        assert_eq!(ijk.interior(1), Some((LambdaMonomial(0b101), -1)));
        assert_eq!(ijk.interior(2), Some((LambdaMonomial(0b011), 1)));
        assert_eq!(LambdaMonomial::ONE.interior(0), None);
    }

    #[test]
    fn exterior_order_is_lexicographic() {
        let b = ExteriorBasis::new(3);
        let deg2: Vec<Vec<usize>> = b.degree(2).iter().map(|m| m.indices()).collect();
        assert_eq!(deg2, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(b.dims().as_vec(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn symmetric_order_is_graded_lex() {
        let s = SymBasis::new(3, 2);
        let deg2: Vec<Vec<u32>> = s.degree(2).iter().map(|m| m.0.clone()).collect();
        assert_eq!(
            deg2,
            vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]]
        );
        assert_eq!(s.dims().as_vec(), vec![1, 0, 3, 0, 6]);
    }

    #[test]
    fn formatting() {
        let t = format_terms(vec![(q(1), "a".into()), (q(-2), "b".into()), (crate::linalg::qf(1, 2), "1".into())]);
        assert_eq!(t, "a - 2·b + 1/2");
    }
}
