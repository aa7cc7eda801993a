//! Invariant cohomology `(M)^g` with its action of invariant multivectors,
//! and the Cartan model `(M)_g = (S•g* ⊗ M)^g` with its `(S•g*)^g`-action.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, ComplexError};
use crate::graded::{tensor_op, LinMap, TensorBasis};
use crate::kg::KgModule;
use crate::lie::{invariant_vectors, LieAlgebra};
use crate::linalg::{Matrix, Rational, SparseVec, Subspace};
use crate::monomial::{ExteriorBasis, LambdaMonomial, SymBasis};
use crate::signs::{koszul, pairing};
use crate::weil::SymOps;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivariantError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("differential does not preserve invariants out of degree {0}")]
    NotRestricting(i32),
}

/// `(S^a g*)^g`: kernel of the coadjoint derivations on `S^a`.
pub fn s_invariants(g: &LieAlgebra, sym: &SymBasis, a: usize) -> Vec<SparseVec> {
    if a == 0 {
        return vec![SparseVec::unit(1, 0)];
    }
    let reps: Vec<Matrix> = g.coad_matrices().iter().map(|c| sym.derivation(c, a)).collect();
    if reps.is_empty() {
        return (0..sym.degree(a).len()).map(|i| SparseVec::unit(sym.degree(a).len(), i)).collect();
    }
    invariant_vectors(&reps)
}

/// Invariant multivectors `(Λ•g)^g`, by degree.
#[derive(Clone, Debug)]
pub struct LambdaLower {
    ext: ExteriorBasis,
    labels: Vec<String>,
    by_degree: Vec<Vec<SparseVec>>,
}

impl LambdaLower {
    pub fn new(g: &LieAlgebra) -> Self {
        let ext = ExteriorBasis::new(g.dim());
        let ads = g.ad_matrices();
        let by_degree = (0..=g.dim())
            .map(|p| {
                if ads.is_empty() || p == 0 {
                    let n = ext.degree(p).len();
                    return (0..n).map(|i| SparseVec::unit(n, i)).collect();
                }
                invariant_vectors(&ads.iter().map(|a| ext.derivation(a, p)).collect::<Vec<_>>())
            })
            .collect();
        Self { ext, labels: g.labels().to_vec(), by_degree }
    }

    pub fn degree(&self, p: usize) -> &[SparseVec] {
        &self.by_degree[p]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.by_degree.iter().map(Vec::len).collect()
    }

    /// Monomial expansion of an element of degree `p`.
    pub fn terms(&self, p: usize, v: &SparseVec) -> Vec<(LambdaMonomial, Rational)> {
        v.entries().iter().map(|(i, c)| (self.ext.degree(p)[*i], c.clone())).collect()
    }

    /// Positive-degree basis elements as `(degree, monomial terms)`.
    pub fn positive_basis(&self) -> Vec<(usize, Vec<(LambdaMonomial, Rational)>)> {
        (1..self.by_degree.len())
            .flat_map(|p| self.by_degree[p].iter().map(move |v| (p, self.terms(p, v))))
            .collect()
    }

    pub fn label(&self, p: usize, v: &SparseVec) -> String {
        crate::monomial::format_terms(
            v.entries().iter().map(|(i, c)| (c.clone(), self.ext.degree(p)[*i].label(&self.labels))),
        )
    }
}

/// `(M)^g` as a subcomplex of `M`.
#[derive(Clone, Debug)]
pub struct InvariantModel {
    module: KgModule,
    subspaces: Vec<Subspace>,
    complex: Complex,
    lambda: LambdaLower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub dims: Vec<usize>,
    pub lambda_dims: Vec<usize>,
    pub lambda_preserves_invariants: bool,
    /// `d ∘ i_x = (-1)^{|x|} i_x ∘ d` on invariants.
    pub lambda_graded_commutes_with_d: bool,
    pub lambda_supercommutes: bool,
}

/// Simultaneous kernel of the `L_k` in each degree where they are exact.
pub fn invariant_subspaces(m: &KgModule) -> Vec<Subspace> {
    let top = m.exact_through().map_or(m.hi(), |e| e.min(m.hi()));
    let n = m.algebra().dim();
    (m.lo()..=top)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&d| {
            let cols = m.dims().dim(d);
            if n == 0 {
                return Subspace::full(cols);
            }
            let blocks: Vec<Matrix> = (0..n).map(|k| m.l(k).block(d)).collect();
            Subspace::kernel(&Matrix::vstack(&blocks.iter().collect::<Vec<_>>(), cols))
        })
        .collect()
}

pub fn invariant_subcomplex(m: &KgModule) -> Result<InvariantModel, EquivariantError> {
    let subspaces = invariant_subspaces(m);
    let top = m.lo() + subspaces.len() as i32 - 1;
    let exact = m.exact_through().map(|e| if e >= m.hi() { e } else { top - 1 });
    let labels = subspaces
        .iter()
        .zip(m.lo()..)
        .map(|(s, d)| s.basis().iter().map(|v| m.space().format(d, v)).collect())
        .collect();
    let complex = m.complex().subcomplex(&subspaces, labels, exact).map_err(EquivariantError::NotRestricting)?;
    Ok(InvariantModel { module: m.clone(), subspaces, complex, lambda: LambdaLower::new(m.algebra()) })
}

impl InvariantModel {
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn module(&self) -> &KgModule {
        &self.module
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn lambda(&self) -> &LambdaLower {
        &self.lambda
    }

    /// Vector of invariant basis element `i` of degree `d` in `M`.
    pub fn ambient_vector(&self, d: i32, i: usize) -> SparseVec {
        self.subspaces[(d - self.complex.lo()) as usize].basis()[i].clone()
    }

    /// Embedding `(M)^g → M` as a graded map.
    pub fn embedding(&self) -> LinMap {
        LinMap::from_blocks(self.complex.dims(), self.module.dims(), 0, |d| {
            self.subspaces[(d - self.complex.lo()) as usize].embedding()
        })
    }

    /// Action of the invariant multivector with the given terms: the
    /// composite contraction restricted to invariants. `None` if it leaves
    /// the invariants.
    pub fn action(&self, p: usize, terms: &[(LambdaMonomial, Rational)]) -> Option<LinMap> {
        let op = self.module.multivector_contraction(terms);
        let dims = self.complex.dims().clone();
        let lo = dims.lo();
        let mut blocks = Vec::new();
        for d in dims.degrees() {
            let t = d - p as i32;
            let src = &self.subspaces[(d - lo) as usize];
            if t < lo {
                blocks.push(Matrix::zeros(0, src.dim()));
                continue;
            }
            let tgt = &self.subspaces[(t - lo) as usize];
            blocks.push(src.restrict(&op.block(d), tgt).ok()?);
        }
        Some(LinMap::from_blocks(&dims, &dims, -(p as i32), |d| blocks[(d - lo) as usize].clone()))
    }

    pub fn verify(&self) -> InvariantReport {
        let basis = self.lambda.positive_basis();
        let actions: Vec<Option<LinMap>> = basis.iter().map(|(p, t)| self.action(*p, t)).collect();
        let preserves = actions.iter().all(Option::is_some);
        let c = &self.complex;
        let keep = |d: i32| c.is_exact_at(d);
        let mut commutes = true;
        let mut supercommutes = true;
        if preserves {
            let acts: Vec<(usize, LinMap)> =
                basis.iter().zip(actions).map(|((p, _), a)| (*p, a.unwrap())).collect();
            for (p, a) in &acts {
                let lhs = c.d().compose(a);
                let rhs = a.compose(c.d()).scale(&crate::linalg::q(koszul(*p as i32)));
                if lhs.sub(&rhs).first_nonzero_where(keep).is_some() {
                    commutes = false;
                }
            }
            for (x, (p, a)) in acts.iter().enumerate() {
                for (q, b) in &acts[x..] {
                    let lhs = a.compose(b);
                    let rhs = b.compose(a).scale(&crate::linalg::q(koszul((*p * *q) as i32)));
                    if lhs != rhs {
                        supercommutes = false;
                    }
                }
            }
        }
        InvariantReport {
            dims: c.dims().as_vec(),
            lambda_dims: self.lambda.dims(),
            lambda_preserves_invariants: preserves,
            lambda_graded_commutes_with_d: preserves && commutes,
            lambda_supercommutes: preserves && supercommutes,
        }
    }
}

/// `(S•g* ⊗ M)^g` with `d(a⊗m) = a⊗dm - PAIRING·Σ_k λ^k a ⊗ i_k m`.
#[derive(Clone, Debug)]
pub struct CartanModel {
    module: KgModule,
    sym: SymBasis,
    basis: TensorBasis,
    ambient: Complex,
    subspaces: Vec<Subspace>,
    complex: Complex,
    s_upper: Vec<Vec<SparseVec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanReport {
    pub dims: Vec<usize>,
    pub d_squared_zero: bool,
    pub s_action_commutes_with_d: bool,
}

/// Builds the Cartan model in total degrees `lo(M)..=top`. The module must
/// be exact through `top`.
pub fn cartan_model(m: &KgModule, top: i32) -> Result<CartanModel, EquivariantError> {
    m.complex().require_exact(top)?;
    let g = m.algebra().clone();
    let n = g.dim();
    let max_poly = ((top - m.lo()).max(0) / 2) as usize;
    let sym = SymBasis::new(n, max_poly);
    let sops = SymOps::new(&sym);
    let basis = TensorBasis::new(&sops.dims, m.dims(), top);
    let dims = basis.dims().clone();
    let one = |_: i32, _: i32| 1;
    let mut d = tensor_op(&basis, None, Some(m.d()), one);
    let contractions: Vec<LinMap> = (0..n)
        .into_par_iter()
        .map(|k| tensor_op(&basis, Some(&sops.generator(k)), Some(m.i(k)), one))
        .collect();
    for c in &contractions {
        d = d.axpy(&-pairing(), c);
    }
    let coad = g.coad_matrices();
    let lie: Vec<LinMap> = (0..n)
        .into_par_iter()
        .map(|k| {
            tensor_op(&basis, Some(&sops.derivation(&coad[k])), None, one)
                .add(&tensor_op(&basis, None, Some(m.l(k)), one))
        })
        .collect();
    let names = g.dual_labels();
    let space = crate::graded::GradedSpace::new(dims.lo(), basis.labels(&sops.space(&names), m.space()));
    let ambient = Complex::new_unchecked(space, d, Some(top - 1));
    let subspaces: Vec<Subspace> = dims
        .degrees()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&t| {
            let cols = dims.dim(t);
            if n == 0 {
                return Subspace::full(cols);
            }
            let blocks: Vec<Matrix> = lie.iter().map(|l| l.block(t)).collect();
            Subspace::kernel(&Matrix::vstack(&blocks.iter().collect::<Vec<_>>(), cols))
        })
        .collect();
    let labels = subspaces
        .iter()
        .zip(dims.lo()..)
        .map(|(s, t)| s.basis().iter().map(|v| ambient.space().format(t, v)).collect())
        .collect();
    let complex = ambient
        .subcomplex(&subspaces, labels, Some(top - 1))
        .map_err(EquivariantError::NotRestricting)?;
    let s_upper = (0..=max_poly).map(|a| s_invariants(&g, &sym, a)).collect();
    Ok(CartanModel { module: m.clone(), sym, basis, ambient, subspaces, complex, s_upper })
}

impl CartanModel {
    pub fn module(&self) -> &KgModule {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.module.algebra()
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn ambient(&self) -> &Complex {
        &self.ambient
    }

    pub fn sym(&self) -> &SymBasis {
        &self.sym
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn top(&self) -> i32 {
        self.complex.hi()
    }

    /// Basis of `(S^a g*)^g`.
    pub fn s_upper(&self, a: usize) -> Vec<SparseVec> {
        self.s_upper.get(a).cloned().unwrap_or_default()
    }

    pub fn ambient_vector(&self, d: i32, i: usize) -> SparseVec {
        self.subspaces[(d - self.complex.lo()) as usize].basis()[i].clone()
    }

    /// Multiplication by `s ∈ (S^a g*)^g` on the Cartan complex.
    pub fn s_action(&self, a: usize, s: &SparseVec) -> LinMap {
        let sops = SymOps::new(&self.sym);
        let op = tensor_op(&self.basis, Some(&sops.multiplication(s, a)), None, |_, _| 1);
        let dims = self.complex.dims().clone();
        let lo = dims.lo();
        let shift = 2 * a as i32;
        LinMap::from_blocks(&dims, &dims, shift, |d| {
            let src = &self.subspaces[(d - lo) as usize];
            let t = d + shift;
            if t > dims.hi() {
                return Matrix::zeros(0, src.dim());
            }
            src.restrict(&op.block(d), &self.subspaces[(t - lo) as usize])
                .expect("invariant polynomials preserve invariants")
        })
    }

    pub fn verify(&self) -> CartanReport {
        let c = &self.complex;
        let d_squared_zero = c.first_dd_failure().is_none();
        let mut commutes = true;
        for a in 1..self.s_upper.len() {
            for s in &self.s_upper[a] {
                let act = self.s_action(a, s);
                let defect = c.d().compose(&act).sub(&act.compose(c.d()));
                if defect.first_nonzero_where(|d| d + 2 * (a as i32) < c.hi()).is_some() {
                    commutes = false;
                }
            }
        }
        CartanReport { dims: c.dims().as_vec(), d_squared_zero, s_action_commutes_with_d: commutes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{exterior_model, trivial_module};

    fn su2() -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::builtin("su2").unwrap())
    }

    #[test]
    fn invariants_of_exterior_su2() {
        let g = su2();
        let inv = invariant_subcomplex(&exterior_model(&g)).unwrap();
        assert_eq!(inv.complex().dims().as_vec(), vec![1, 0, 0, 1]);
        assert!(inv.complex().d().is_zero());
        let r = inv.verify();
        assert!(r.lambda_preserves_invariants && r.lambda_graded_commutes_with_d && r.lambda_supercommutes);
        // the invariant 3-vector sends i*∧j*∧k* to a nonzero scalar
        let (p, terms) = inv.lambda().positive_basis().pop().unwrap();
        assert_eq!(p, 3);
        let a = inv.action(p, &terms).unwrap();
        assert!(!a.block(3).is_zero());
    }

    #[test]
    fn cartan_of_trivial_su2() {
        let g = su2();
        let c = cartan_model(&trivial_module(&g), 8).unwrap();
        let h = c.complex().cohomology(9).unwrap_err();
        assert!(matches!(h, ComplexError::WindowTooSmall { .. }));
        let h = c.complex().cohomology(8).unwrap();
        assert_eq!(h.betti_vec(), vec![1, 0, 0, 0, 1, 0, 0, 0]);
        assert!(c.complex().d().is_zero());
        let r = c.verify();
        assert!(r.d_squared_zero && r.s_action_commutes_with_d);
    }

    #[test]
    fn cartan_of_exterior_su2_is_acyclic() {
        let g = su2();
        let c = cartan_model(&exterior_model(&g), 8).unwrap();
        let h = c.complex().cohomology(8).unwrap();
        assert_eq!(h.betti_vec(), vec![1, 0, 0, 0, 0, 0, 0, 0]);
        let r = c.verify();
        assert!(r.d_squared_zero && r.s_action_commutes_with_d);
    }

    #[test]
    fn s_invariants_su2() {
        let g = su2();
        let sym = SymBasis::new(3, 4);
        let dims: Vec<usize> = (0..=4).map(|a| s_invariants(&g, &sym, a).len()).collect();
        assert_eq!(dims, vec![1, 0, 1, 0, 1]);
    }
}
