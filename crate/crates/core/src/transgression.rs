//! Primitive invariant forms and the distinguished transgression
//! `ξ ↦ (ω, ξ̃)`, found as the solution of one affine linear system per `ξ`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivariant::{invariant_subspaces, s_invariants, LambdaLower};
use crate::kg::exterior_model;
use crate::lie::LieAlgebra;
use crate::linalg::{complement_basis, kernel_basis, rank, solve_affine, Matrix, Rational, SparseVec, Subspace};
use crate::monomial::{format_terms, ExteriorBasis, LambdaMonomial, SymBasis, SymMonomial};
use crate::weil::{weil_model, WeilAlgebra, WeilTerms};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransgressionError {
    #[error("exterior algebra on the primitives does not match the invariants in degree {degree}: {expected} vs {found}")]
    DimensionCount { degree: usize, expected: usize, found: usize },
    #[error("primitive of even degree {0}")]
    EvenPrimitive(usize),
    #[error("transgression system inconsistent for primitive {0}")]
    Inconsistent(String),
}

/// A chosen complement `P` of the decomposables in the positive-degree
/// invariants of `Λ•g*`.
#[derive(Clone, Debug)]
pub struct PrimitiveSpace {
    g: Arc<LieAlgebra>,
    ext: ExteriorBasis,
    invariant_dims: Vec<usize>,
    decomposable_dims: Vec<usize>,
    primitives: Vec<(usize, SparseVec)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveReport {
    pub invariant_dims: Vec<usize>,
    pub decomposable_dims: Vec<usize>,
    pub primitive_degrees: Vec<usize>,
    pub primitives: Vec<String>,
}

/// Dimensions of the free graded-commutative algebra on generators of the
/// given degrees, in degrees `0..=top`.
pub fn free_algebra_dims(degrees: &[usize], top: usize) -> Vec<usize> {
    let mut dims = vec![0usize; top + 1];
    dims[0] = 1;
    for &d in degrees {
        if d % 2 == 1 {
            for t in (d..=top).rev() {
                dims[t] += dims[t - d];
            }
        } else if d > 0 {
            for t in d..=top {
                dims[t] += dims[t - d];
            }
        }
    }
    dims
}

pub fn primitive_basis(g: &Arc<LieAlgebra>) -> Result<PrimitiveSpace, TransgressionError> {
    let n = g.dim();
    let ext = ExteriorBasis::new(n);
    let inv = invariant_subspaces(&exterior_model(g));
    let mut primitives = Vec::new();
    let mut decomposable_dims = vec![0];
    for m in 1..=n {
        let mut products = Vec::new();
        for a in 1..m {
            for x in inv[a].basis() {
                let left = ext.multiplication(x, a, m - a, false);
                products.extend(inv[m - a].basis().iter().map(|y| left.mul_vec(y)));
            }
        }
        let dec = Subspace::from_spanning(ext.degree(m).len(), products);
        decomposable_dims.push(dec.dim());
        let p = complement_basis(dec.basis(), inv[m].basis()).expect("decomposables are invariant");
        primitives.extend(p.into_iter().map(|v| (m, v)));
    }
    let space = PrimitiveSpace {
        g: g.clone(),
        ext,
        invariant_dims: inv.iter().map(Subspace::dim).collect(),
        decomposable_dims,
        primitives,
    };
    space.verify()?;
    Ok(space)
}

impl PrimitiveSpace {
    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.g
    }

    pub fn ext(&self) -> &ExteriorBasis {
        &self.ext
    }

    /// `(degree, vector in Λ^degree)` for each primitive, in order.
    pub fn primitives(&self) -> &[(usize, SparseVec)] {
        &self.primitives
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.primitives.iter().map(|(d, _)| *d).collect()
    }

    pub fn label(&self, p: usize, v: &SparseVec) -> String {
        let names = self.g.dual_labels();
        format_terms(v.entries().iter().map(|(i, c)| (c.clone(), self.ext.degree(p)[*i].label(&names))))
    }

    /// Wedge product `ξ_{j_1} ∧ … ∧ ξ_{j_r}` of primitives, left to right.
    pub fn product(&self, subset: &[usize]) -> (usize, SparseVec) {
        let mut deg = 0;
        let mut acc = SparseVec::unit(1, 0);
        for &j in subset {
            let (p, v) = &self.primitives[j];
            acc = self.ext.multiplication(v, *p, deg, true).mul_vec(&acc);
            deg += p;
        }
        (deg, acc)
    }

    /// The exterior algebra on `P` must match the invariants degreewise, and
    /// the products of primitives must span them.
    pub fn verify(&self) -> Result<(), TransgressionError> {
        let n = self.g.dim();
        let degs = self.degrees();
        if let Some(&d) = degs.iter().find(|&&d| d % 2 == 0) {
            return Err(TransgressionError::EvenPrimitive(d));
        }
        let total: usize = degs.iter().sum();
        let free = free_algebra_dims(&degs, total.max(n));
        for (degree, &found) in free.iter().enumerate() {
            let expected = self.invariant_dims.get(degree).copied().unwrap_or(0);
            if expected != found {
                return Err(TransgressionError::DimensionCount { degree, expected, found });
            }
        }
        let r = degs.len();
        let mut by_degree: Vec<Vec<SparseVec>> = vec![Vec::new(); n + 1];
        for mask in 0u64..(1 << r) {
            let subset: Vec<usize> = (0..r).filter(|j| mask >> j & 1 == 1).collect();
            let (d, v) = self.product(&subset);
            by_degree[d].push(v);
        }
        for (degree, vs) in by_degree.iter().enumerate() {
            let found = if vs.is_empty() { 0 } else { rank(&Matrix::from_columns(vs[0].dim(), vs)) };
            if found != self.invariant_dims[degree] {
                return Err(TransgressionError::DimensionCount {
                    degree,
                    expected: self.invariant_dims[degree],
                    found,
                });
            }
        }
        Ok(())
    }

    pub fn report(&self) -> PrimitiveReport {
        PrimitiveReport {
            invariant_dims: self.invariant_dims.clone(),
            decomposable_dims: self.decomposable_dims.clone(),
            primitive_degrees: self.degrees(),
            primitives: self.primitives.iter().map(|(p, v)| self.label(*p, v)).collect(),
        }
    }
}

/// `ω(ξ)` and `ξ̃` for one primitive, stored basis-independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transgression {
    pub degree: usize,
    pub xi: SparseVec,
    pub omega: WeilTerms,
    pub xi_tilde: Vec<(SymMonomial, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransgressionCheck {
    pub xi: String,
    pub degree: usize,
    pub omega: String,
    pub xi_tilde: String,
    pub restriction_ok: bool,
    pub contractions_ok: bool,
    pub differential_ok: bool,
    pub omega_invariant: bool,
    /// Every solution of the homogeneous system has zero `ξ̃` component.
    pub xi_tilde_unique: bool,
    /// Re-solving with the unknowns in reverse order gives the same `ξ̃`.
    pub permuted_order_agrees: bool,
}

impl TransgressionCheck {
    pub fn pass(&self) -> bool {
        self.restriction_ok
            && self.contractions_ok
            && self.differential_ok
            && self.omega_invariant
            && self.xi_tilde_unique
            && self.permuted_order_agrees
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationDegree {
    pub degree: usize,
    pub invariant_dim: usize,
    pub monomials: usize,
    pub span_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransgressionReport {
    pub primitives: PrimitiveReport,
    pub checks: Vec<TransgressionCheck>,
    pub generation: Vec<GenerationDegree>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct TransgressionData {
    pub primitives: PrimitiveSpace,
    pub entries: Vec<Transgression>,
    pub checks: Vec<TransgressionCheck>,
}

/// The three conditions as one system: unknowns are coordinates of `ω` in
/// `W^p` invariants, then of `ξ̃` in `(S^{(p+1)/2})^g`.
struct System {
    w: WeilAlgebra,
    inv_w: Subspace,
    s_inv: Vec<SparseVec>,
    a: Matrix,
    b: SparseVec,
    contractions: Vec<Matrix>,
    xi_w: SparseVec,
}

fn build_system(g: &Arc<LieAlgebra>, lower: &LambdaLower, p: usize, xi: &SparseVec) -> System {
    let pt = p as i32;
    let w = weil_model(g, pt + 1);
    let wm = w.module();
    let n = g.dim();
    let cols = w.dims().dim(pt);
    let l_blocks: Vec<Matrix> = (0..n).map(|k| wm.l(k).block(pt)).collect();
    let inv_w = if n == 0 {
        Subspace::full(cols)
    } else {
        Subspace::kernel(&Matrix::vstack(&l_blocks.iter().collect::<Vec<_>>(), cols))
    };
    let a_deg = (p + 1) / 2;
    let s_inv = s_invariants(g, w.sym(), a_deg);
    let bmat = inv_w.embedding();
    let jmat = Matrix::from_columns(
        w.dims().dim(pt + 1),
        &s_inv.iter().map(|s| w.sym_element(a_deg, s)).collect::<Vec<_>>(),
    );
    let xi_w = w.lambda_element(p, xi);
    let (k1, k2) = (bmat.cols(), jmat.cols());

    let mut rows: Vec<Matrix> = Vec::new();
    let mut rhs: Vec<SparseVec> = Vec::new();
    let restriction = w.restriction().block(pt);
    rows.push(Matrix::hstack(&[&(&restriction * &bmat), &Matrix::zeros(restriction.rows(), k2)], restriction.rows()));
    rhs.push(xi.clone());
    let mut contractions = Vec::new();
    for (q, terms) in lower.positive_basis() {
        if q > p {
            continue;
        }
        let op = wm.multivector_contraction(&terms).block(pt);
        rows.push(Matrix::hstack(&[&(&op * &bmat), &Matrix::zeros(op.rows(), k2)], op.rows()));
        rhs.push(op.mul_vec(&xi_w));
        contractions.push(op);
    }
    let d = wm.d().block(pt);
    rows.push(Matrix::hstack(&[&(&d * &bmat), &jmat.scale(&crate::linalg::q(-1))], d.rows()));
    rhs.push(SparseVec::zero(d.rows()));

    let a = Matrix::vstack(&rows.iter().collect::<Vec<_>>(), k1 + k2);
    let total: usize = rhs.iter().map(SparseVec::dim).sum();
    let mut raw = Vec::new();
    let mut off = 0;
    for r in &rhs {
        raw.extend(r.entries().iter().map(|(i, c)| (i + off, c.clone())));
        off += r.dim();
    }
    let b = SparseVec::from_entries(total, raw);
    System { w, inv_w, s_inv, a, b, contractions, xi_w }
}

fn reverse_columns(a: &Matrix) -> Matrix {
    let n = a.cols();
    let rows = a
        .row_vecs()
        .iter()
        .map(|r| SparseVec::from_entries(n, r.entries().iter().map(|(j, c)| (n - 1 - j, c.clone())).collect()))
        .collect();
    Matrix::from_rows(n, rows)
}

fn unreverse(x: &SparseVec) -> SparseVec {
    let n = x.dim();
    SparseVec::from_entries(n, x.entries().iter().map(|(j, c)| (n - 1 - j, c.clone())).collect())
}

fn solve_one(
    g: &Arc<LieAlgebra>,
    prims: &PrimitiveSpace,
    lower: &LambdaLower,
    p: usize,
    xi: &SparseVec,
    corrupt: bool,
) -> Result<(Transgression, TransgressionCheck), TransgressionError> {
    let label = prims.label(p, xi);
    let sys = build_system(g, lower, p, xi);
    let k1 = sys.inv_w.dim();
    let x = solve_affine(&sys.a, &sys.b)
        .expect("system shapes agree")
        .ok_or_else(|| TransgressionError::Inconsistent(label.clone()))?;
    let split = |x: &SparseVec| -> (SparseVec, SparseVec) {
        let alpha = x.select(&(0..k1).collect::<Vec<_>>());
        let beta = x.select(&(k1..x.dim()).collect::<Vec<_>>());
        (alpha, beta)
    };
    let (alpha, beta) = split(&x);
    let xr = solve_affine(&reverse_columns(&sys.a), &sys.b)
        .expect("system shapes agree")
        .expect("consistency does not depend on column order");
    let (_, beta_r) = split(&unreverse(&xr));
    let xi_tilde_unique = kernel_basis(&sys.a).iter().all(|v| split(v).1.is_zero());

    let pt = p as i32;
    let a_deg = (p + 1) / 2;
    let w = &sys.w;
    let omega = if corrupt { sys.xi_w.clone() } else { sys.inv_w.embedding().mul_vec(&alpha) };
    let s_poly = {
        let mut acc = SparseVec::zero(w.sym().degree(a_deg).len());
        for (j, c) in beta.entries() {
            acc = acc.axpy(c, &sys.s_inv[*j]);
        }
        acc
    };
    let wm = w.module();
    let restriction_ok = w.restriction().apply(pt, &omega) == *xi;
    let contractions_ok = sys.contractions.iter().all(|op| op.mul_vec(&omega) == op.mul_vec(&sys.xi_w));
    let differential_ok = wm.d().apply(pt, &omega) == w.sym_element(a_deg, &s_poly);
    let omega_invariant = (0..g.dim()).all(|k| wm.l(k).apply(pt, &omega).is_zero());
    let names = g.dual_labels();
    let check = TransgressionCheck {
        xi: label,
        degree: p,
        omega: w.format(pt, &omega),
        xi_tilde: w.sym().format(&s_poly, a_deg, &names),
        restriction_ok,
        contractions_ok,
        differential_ok,
        omega_invariant,
        xi_tilde_unique,
        permuted_order_agrees: beta == beta_r,
    };
    let t = Transgression {
        degree: p,
        xi: xi.clone(),
        omega: w.terms(pt, &omega),
        xi_tilde: s_poly
            .entries()
            .iter()
            .map(|(j, c)| (w.sym().degree(a_deg)[*j].clone(), c.clone()))
            .collect(),
    };
    Ok((t, check))
}

/// Solves for every primitive. With `corrupt`, `ω(ξ)` is replaced by `1⊗ξ`
/// after solving; `ξ̃` is kept.
pub fn distinguished_transgression(
    prims: &PrimitiveSpace,
    corrupt: bool,
) -> Result<TransgressionData, TransgressionError> {
    let g = prims.algebra().clone();
    let lower = LambdaLower::new(&g);
    let results: Vec<Result<(Transgression, TransgressionCheck), TransgressionError>> = prims
        .primitives()
        .par_iter()
        .map(|(p, xi)| solve_one(&g, prims, &lower, *p, xi, corrupt))
        .collect();
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    for r in results {
        let (t, c) = r?;
        entries.push(t);
        checks.push(c);
    }
    Ok(TransgressionData { primitives: prims.clone(), entries, checks })
}

impl TransgressionData {
    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.primitives.algebra()
    }

    /// `ξ̃_j` as a vector of `S^a` in the given basis, with `a`.
    pub fn xi_tilde_in(&self, j: usize, sym: &SymBasis) -> (usize, SparseVec) {
        let a = (self.entries[j].degree + 1) / 2;
        let raw = self.entries[j].xi_tilde.iter().map(|(m, c)| (sym.index_of(m), c.clone())).collect();
        (a, SparseVec::from_entries(sym.degree(a).len(), raw))
    }

    /// Checks that the `ξ̃` freely generate `(S•g*)^g` through polynomial
    /// degree `max_poly`.
    pub fn generation(&self, max_poly: usize) -> Vec<GenerationDegree> {
        let g = self.algebra();
        let sym = SymBasis::new(g.dim(), max_poly);
        let gens: Vec<(usize, SparseVec)> = (0..self.entries.len()).map(|j| self.xi_tilde_in(j, &sym)).collect();
        // all monomials in the generators, by polynomial degree
        let mut by_degree: Vec<Vec<SparseVec>> = vec![Vec::new(); max_poly + 1];
        by_degree[0].push(SparseVec::unit(1, 0));
        for (a, v) in &gens {
            let mut next = by_degree.clone();
            for base in 0..=max_poly {
                for power in 1.. {
                    let target = base + power * a;
                    if target > max_poly || *a == 0 {
                        break;
                    }
                    for x in &by_degree[base] {
                        let mut y = x.clone();
                        let mut d = base;
                        for _ in 0..power {
                            y = sym.multiplication(v, *a, d).expect("inside window").mul_vec(&y);
                            d += a;
                        }
                        next[target].push(y);
                    }
                }
            }
            by_degree = next;
        }
        (0..=max_poly)
            .map(|a| {
                let vs = &by_degree[a];
                let span_rank = if vs.is_empty() { 0 } else { rank(&Matrix::from_columns(vs[0].dim(), vs)) };
                GenerationDegree {
                    degree: 2 * a,
                    invariant_dim: s_invariants(g, &sym, a).len(),
                    monomials: vs.len(),
                    span_rank,
                }
            })
            .collect()
    }

    pub fn report(&self, max_poly: usize) -> TransgressionReport {
        let generation = self.generation(max_poly);
        let gen_ok = generation.iter().all(|x| x.invariant_dim == x.monomials && x.monomials == x.span_rank);
        let pass = gen_ok && self.checks.iter().all(TransgressionCheck::pass);
        TransgressionReport { primitives: self.primitives.report(), checks: self.checks.clone(), generation, pass }
    }

    /// `ω(ξ_j)` as a vector in `W`.
    pub fn omega_in(&self, j: usize, w: &WeilAlgebra) -> SparseVec {
        w.from_terms(self.entries[j].degree as i32, &self.entries[j].omega)
            .expect("Weil window covers the transgression")
    }

    /// Exterior element of the primitive `j` in monomial form.
    pub fn xi_terms(&self, j: usize) -> Vec<(LambdaMonomial, Rational)> {
        let p = self.entries[j].degree;
        let ext = self.primitives.ext();
        self.entries[j].xi.entries().iter().map(|(i, c)| (ext.degree(p)[*i], c.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};

    fn alg(name: &str) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::builtin(name).unwrap())
    }

    #[test]
    fn free_dims() {
        assert_eq!(free_algebra_dims(&[3], 4), vec![1, 0, 0, 1, 0]);
        assert_eq!(free_algebra_dims(&[4], 8), vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(free_algebra_dims(&[1, 1], 2), vec![1, 2, 1]);
    }

    #[test]
    fn su2_primitive_and_transgression() {
        let g = alg("su2");
        let p = primitive_basis(&g).unwrap();
        assert_eq!(p.degrees(), vec![3]);
        assert_eq!(p.report().primitives, vec!["i*∧j*∧k*"]);
        let t = distinguished_transgression(&p, false).unwrap();
        assert!(t.checks[0].pass(), "{:?}", t.checks[0]);
        assert_eq!(t.checks[0].xi_tilde, "1/2·i*^2 + 1/2·j*^2 + 1/2·k*^2");
        let half = qf(1, 2);
        let expect: Vec<(SymMonomial, Rational)> =
            (0..3).map(|k| (SymMonomial::generator(3, k).times(&SymMonomial::generator(3, k)), half.clone())).collect();
        let mut got = t.entries[0].xi_tilde.clone();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        let r = t.report(4);
        assert!(r.pass, "{r:?}");
        let _ = q(0);
    }

    #[test]
    fn abelian_primitives_are_generators() {
        let g = alg("abelian:2");
        let p = primitive_basis(&g).unwrap();
        assert_eq!(p.degrees(), vec![1, 1]);
        let t = distinguished_transgression(&p, false).unwrap();
        assert!(t.report(4).pass);
        assert_eq!(t.checks[0].omega, "1⊗t1*");
        assert_eq!(t.checks[0].xi_tilde, "t1*");
    }

    #[test]
    fn product_algebra_has_two_primitives() {
        let g = alg("su2xsu2");
        let p = primitive_basis(&g).unwrap();
        assert_eq!(p.degrees(), vec![3, 3]);
        let t = distinguished_transgression(&p, false).unwrap();
        assert!(t.checks.iter().all(TransgressionCheck::pass));
    }
}
