//! The functor `h`, the map `ψ: h((M)_g) → (W(g)⊗M)^g` built from the
//! distinguished transgression, the inclusion `(M)^g → (W(g)⊗M)^g`, and the
//! end-to-end check that both legs are quasi-isomorphisms.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{quasi_iso_check, Complex, ComplexError, QuasiIsoReport};
use crate::equivariant::{cartan_model, invariant_subcomplex, CartanModel, EquivariantError, InvariantModel, LambdaLower};
use crate::graded::{tensor_op, Dims, GradedSpace, LinMap, TensorBasis};
use crate::kg::{exterior_model, tensor_module, KgError, KgModule};
use crate::linalg::{solve_affine, Matrix, SparseVec};
use crate::monomial::{LambdaMonomial, SymMonomial};
use crate::transgression::{distinguished_transgression, primitive_basis, TransgressionData, TransgressionError};
use crate::weil::{psi0, weil_model, Psi0, WeilAlgebra};

#[derive(Debug, Error)]
pub enum DualityError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Equivariant(#[from] EquivariantError),
    #[error(transparent)]
    Transgression(#[from] TransgressionError),
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error("max degree must be at least 1")]
    BadDegree,
}

/// Exterior algebra on the primitives, each generator in its own degree.
/// Basis elements are subsets, stored as bitmasks.
#[derive(Clone, Debug)]
pub struct PrimitiveExterior {
    degrees: Vec<usize>,
    by_degree: Vec<Vec<u64>>,
}

impl PrimitiveExterior {
    pub fn new(degrees: &[usize], top: usize) -> Self {
        let mut by_degree = vec![Vec::new(); top + 1];
        for mask in 0u64..(1 << degrees.len()) {
            let d: usize = (0..degrees.len()).filter(|j| mask >> j & 1 == 1).map(|j| degrees[j]).sum();
            if d <= top {
                by_degree[d].push(mask);
            }
        }
        Self { degrees: degrees.to_vec(), by_degree }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(0, self.by_degree.iter().map(Vec::len).collect())
    }

    pub fn degree(&self, p: usize) -> &[u64] {
        self.by_degree.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn subset(mask: u64) -> Vec<usize> {
        (0..64).filter(|j| mask >> j & 1 == 1).collect()
    }

    pub fn index_of(&self, mask: u64) -> Option<(usize, usize)> {
        let p: usize = Self::subset(mask).iter().map(|&j| self.degrees[j]).sum();
        let i = self.degree(p).iter().position(|&m| m == mask)?;
        Some((p, i))
    }

    pub fn label(mask: u64) -> String {
        if mask == 0 {
            return "1".into();
        }
        Self::subset(mask).iter().map(|j| format!("ξ{}", j + 1)).collect::<Vec<_>>().join("∧")
    }

    pub fn space(&self) -> GradedSpace {
        GradedSpace::new(0, self.by_degree.iter().map(|ms| ms.iter().map(|&m| Self::label(m)).collect()).collect())
    }

    /// Removal of generator `j`, with sign `(-1)^{#generators before j}`.
    pub fn remove(&self, j: usize) -> LinMap {
        let dims = self.dims();
        let pj = self.degrees[j] as i32;
        LinMap::from_columns(&dims, &dims, -pj, |d, i| {
            let mask = self.by_degree[d as usize][i];
            let rows = dims.dim(d - pj);
            if mask >> j & 1 == 0 {
                return SparseVec::zero(rows);
            }
            let before = (mask & ((1 << j) - 1)).count_ones();
            let (_, idx) = self.index_of(mask & !(1 << j)).expect("subsets of a fitting subset fit");
            let v = SparseVec::unit(rows, idx);
            if before % 2 == 1 {
                -&v
            } else {
                v
            }
        })
    }
}

/// `h(A) = Λ(P) ⊗ A` with `d_h(ξ_J⊗a) = Σ_j ±ξ_{J∖j}⊗ξ̃_j a + (-1)^{|J|} ξ_J⊗da`.
#[derive(Clone, Debug)]
pub struct HComplex {
    pub exterior: PrimitiveExterior,
    pub basis: TensorBasis,
    pub complex: Complex,
}

/// `actions[j]` is multiplication by `ξ̃_j` on `A`, of degree `deg ξ_j + 1`.
pub fn h_of(a: &Complex, actions: &[LinMap], top: i32) -> Result<HComplex, ComplexError> {
    let degrees: Vec<usize> = actions.iter().map(|f| (f.shift() - 1) as usize).collect();
    let ext = PrimitiveExterior::new(&degrees, (top - a.lo()).max(0) as usize);
    let basis = TensorBasis::new(&ext.dims(), a.dims(), top);
    let mut d = tensor_op(&basis, None, Some(a.d()), |p, _| if p % 2 == 0 { 1 } else { -1 });
    for (j, act) in actions.iter().enumerate() {
        d = d.add(&tensor_op(&basis, Some(&ext.remove(j)), Some(act), |_, _| 1));
    }
    let labels = basis.labels(&ext.space(), a.space());
    let exact = a.exact_through().map(|e| e.min(top - 1)).or(if top < a.hi() { Some(top - 1) } else { None });
    let space = GradedSpace::new(basis.dims().lo(), labels);
    let complex = Complex::new(space, d, exact)?;
    Ok(HComplex { exterior: ext, basis, complex })
}

/// Everything the duality check builds, kept for inspection.
pub struct DualityData {
    pub transgression: TransgressionData,
    pub cartan: CartanModel,
    pub h: HComplex,
    pub psi0: Psi0,
    pub target: InvariantModel,
    pub invariants: InvariantModel,
    /// `ψ` into the ambient `W ⊗ M` chain groups.
    pub psi_ambient: LinMap,
    pub psi: LinMap,
    pub inclusion: LinMap,
    pub psi_lands_in_invariants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub max_degree: i32,
    pub corrupt_transgression: bool,
    pub h_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    pub invariant_dims: Vec<usize>,
    pub d_h_squared_zero: bool,
    pub psi_lands_in_invariants: bool,
    pub psi: QuasiIsoReport,
    pub inclusion: QuasiIsoReport,
    pub betti_h: BTreeMap<i32, usize>,
    pub betti_target: BTreeMap<i32, usize>,
    pub betti_invariant: BTreeMap<i32, usize>,
    pub betti_agree: bool,
    /// `i_λ ∘ ψ = ψ ∘ (i_λ ⊗ 1)` for every invariant multivector basis
    /// element. Reported, not part of the verdict.
    pub contraction_compatible: bool,
    pub pass: bool,
}

fn products(w: &WeilAlgebra, t: &TransgressionData, ext: &PrimitiveExterior) -> Vec<Vec<SparseVec>> {
    let omegas: Vec<Option<SparseVec>> = (0..t.entries.len())
        .map(|j| {
            let deg = t.entries[j].degree as i32;
            (deg <= w.top()).then(|| t.omega_in(j, w))
        })
        .collect();
    (0..ext.dims().as_vec().len())
        .map(|p| {
            ext.degree(p)
                .iter()
                .map(|&mask| {
                    let mut deg = 0;
                    let mut acc = SparseVec::unit(w.dims().dim(0), 0);
                    for j in PrimitiveExterior::subset(mask) {
                        let dj = t.entries[j].degree as i32;
                        acc = w.multiply(deg, &acc, dj, omegas[j].as_ref().expect("product inside the window"));
                        deg += dj;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `w · x` for `w ∈ W^p` and `x` in `W ⊗ M` of degree `t`.
fn weil_times(psi0: &Psi0, p: i32, w: &SparseVec, t: i32, x: &SparseVec) -> SparseVec {
    let basis = &psi0.wm_basis;
    let n = basis.dims().dim(t + p);
    let mut raw = Vec::new();
    for (idx, c) in x.entries() {
        let (wd, wi, mi) = basis.split(t, *idx);
        let u = psi0.weil.multiply(p, w, wd, &SparseVec::unit(psi0.weil.dims().dim(wd), wi));
        for (k, c2) in u.entries() {
            if let Some(r) = basis.index(wd + p, *k, t + p, mi) {
                raw.push((r, c * c2));
            }
        }
    }
    SparseVec::from_entries(n, raw)
}

pub fn build_duality(m: &KgModule, t: TransgressionData, n: i32) -> Result<DualityData, DualityError> {
    if n < 1 {
        return Err(DualityError::BadDegree);
    }
    let g = m.algebra().clone();
    let lo = m.lo();
    let cartan = cartan_model(m, n)?;
    let sym = cartan.sym();
    let actions: Vec<LinMap> = (0..t.entries.len())
        .map(|j| {
            let (a, s) = t.xi_tilde_in(j, sym);
            cartan.s_action(a, &s)
        })
        .collect();
    let h = h_of(cartan.complex(), &actions, n)?;

    let weil = weil_model(&g, n + 1 - lo);
    let wm = tensor_module(weil.module(), m, Some(n + 1))?;
    let p0 = psi0(&cartan, weil, wm);
    let target = invariant_subcomplex(&p0.wm)?;
    let invariants = invariant_subcomplex(m)?;

    let omega = products(&p0.weil, &t, &h.exterior);
    let hdims = h.complex.dims().clone();
    let psi_ambient = LinMap::from_columns(&hdims, p0.wm.dims(), 0, |d, i| {
        let (p, a, b) = h.basis.split(d, i);
        let x = p0.map.apply(d - p, &SparseVec::unit(cartan.complex().dims().dim(d - p), b));
        weil_times(&p0, p, &omega[p as usize][a], d - p, &x)
    });
    let tdims = target.complex().dims().clone();
    let mut lands = true;
    let psi = LinMap::from_blocks(&hdims, &tdims, 0, |d| {
        let block = psi_ambient.block(d);
        let sub = &target.subspaces()[(d - tdims.lo()) as usize];
        let cols: Vec<SparseVec> = block
            .columns()
            .iter()
            .map(|c| {
                sub.coordinates(c).unwrap_or_else(|| {
                    lands = false;
                    SparseVec::zero(sub.dim())
                })
            })
            .collect();
        Matrix::from_columns(sub.dim(), &cols)
    });

    let unit = p0.weil.index(&SymMonomial::one(g.dim()), LambdaMonomial::ONE).expect("unit in W").1;
    let idims = invariants.complex().dims().clone();
    let inclusion = LinMap::from_columns(&idims, &tdims, 0, |d, i| {
        if d > tdims.hi() {
            return SparseVec::zero(0);
        }
        let v = invariants.ambient_vector(d, i);
        let amb = p0.wm_basis.tensor_vectors(0, &SparseVec::unit(p0.weil.dims().dim(0), unit), d, &v);
        target.subspaces()[(d - tdims.lo()) as usize]
            .coordinates(&amb)
            .expect("invariants of M stay invariant in W ⊗ M")
    });

    Ok(DualityData {
        transgression: t,
        cartan,
        h,
        psi0: p0,
        target,
        invariants,
        psi_ambient,
        psi,
        inclusion,
        psi_lands_in_invariants: lands,
    })
}

impl DualityData {
    /// Checks `i_λ ψ = ψ (i_λ ⊗ 1)` on the ambient `W ⊗ M`, where `i_λ ξ_J`
    /// is rewritten in the basis of primitive products.
    pub fn contraction_compatible(&self) -> bool {
        let g = self.transgression.algebra().clone();
        let prims = &self.transgression.primitives;
        let ext_model = exterior_model(&g);
        let ext = &self.h.exterior;
        let hdims = self.h.complex.dims().clone();
        let top = ext.dims().hi();
        // primitive products as vectors of Λ g*, per degree
        let prod_vecs: Vec<Vec<SparseVec>> = (0..=top as usize)
            .map(|p| ext.degree(p).iter().map(|&m| prims.product(&PrimitiveExterior::subset(m)).1).collect())
            .collect();
        let lower = LambdaLower::new(&g);
        lower.positive_basis().into_par_iter().all(|(q, terms)| {
            let q = q as i32;
            let on_lambda = ext_model.multivector_contraction(&terms);
            let on_wm = self.psi0.wm.multivector_contraction(&terms);
            // i_λ on Λ(P)
            let on_p = LinMap::from_columns(&ext.dims(), &ext.dims(), -q, |p, i| {
                let rows = ext.dims().dim(p - q);
                if p - q < 0 {
                    return SparseVec::zero(rows);
                }
                let v = on_lambda.apply(p, &prod_vecs[p as usize][i]);
                let basis = &prod_vecs[(p - q) as usize];
                let a = Matrix::from_columns(v.dim(), basis);
                solve_affine(&a, &v).expect("shapes").expect("invariant forms are products of primitives")
            });
            let on_h = tensor_op(&self.h.basis, Some(&on_p), None, |_, _| 1);
            let lhs = on_wm.compose(&self.psi_ambient);
            let rhs = self.psi_ambient.compose(&on_h);
            hdims.degrees().all(|d| {
                let l = lhs.block(d);
                let r = rhs.block(d);
                l.rows() != r.rows() || (&l - &r).is_zero()
            })
        })
    }

    pub fn report(&self, n: i32, corrupt: bool) -> Result<DualityReport, DualityError> {
        let hc = &self.h.complex;
        let tc = self.target.complex();
        let ic = self.invariants.complex();
        let (psi, inclusion) = rayon::join(
            || quasi_iso_check(&self.psi, hc, tc, n),
            || quasi_iso_check(&self.inclusion, ic, tc, n),
        );
        let (psi, inclusion) = (psi?, inclusion?);
        let betti_h = hc.cohomology(n)?.betti;
        let betti_target = tc.cohomology(n)?.betti;
        let mut betti_invariant = ic.cohomology(n.min(ic.hi() + 1))?.betti;
        for d in ic.lo()..n {
            betti_invariant.entry(d).or_insert(0);
        }
        let range = |b: &BTreeMap<i32, usize>| -> BTreeMap<i32, usize> {
            (hc.lo()..n).map(|d| (d, b.get(&d).copied().unwrap_or(0))).collect()
        };
        let betti_agree = range(&betti_h) == range(&betti_invariant);
        let pass = self.psi_lands_in_invariants && psi.pass && inclusion.pass;
        Ok(DualityReport {
            max_degree: n,
            corrupt_transgression: corrupt,
            h_dims: hc.dims().as_vec(),
            target_dims: tc.dims().as_vec(),
            invariant_dims: ic.dims().as_vec(),
            d_h_squared_zero: hc.first_dd_failure().is_none(),
            psi_lands_in_invariants: self.psi_lands_in_invariants,
            psi,
            inclusion,
            betti_h,
            betti_target,
            betti_invariant,
            betti_agree,
            contraction_compatible: self.contraction_compatible(),
            pass,
        })
    }
}

/// Transgression, `h`, `ψ` and the inclusion for `M`, checked through
/// degree `n - 1`.
pub fn verify_duality(m: &KgModule, n: i32, corrupt: bool) -> Result<DualityReport, DualityError> {
    let prims = primitive_basis(m.algebra())?;
    let t = distinguished_transgression(&prims, corrupt)?;
    build_duality(m, t, n)?.report(n, corrupt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::trivial_module;
    use crate::lie::LieAlgebra;
    use std::sync::Arc;

    fn alg(name: &str) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::builtin(name).unwrap())
    }

    #[test]
    fn removal_signs() {
        let e = PrimitiveExterior::new(&[1, 1], 2);
        let r1 = e.remove(1);
        // ξ1∧ξ2 ↦ -ξ1
        assert_eq!(r1.block(2), Matrix::from_ints(&[&[-1], &[0]]));
        let r0 = e.remove(0);
        assert_eq!(r0.apply(2, &SparseVec::unit(1, 0)), SparseVec::unit(2, 1));
    }

    #[test]
    fn koszul_complex_of_trivial_su2_is_acyclic() {
        let g = alg("su2");
        let m = trivial_module(&g);
        let prims = primitive_basis(&g).unwrap();
        let t = distinguished_transgression(&prims, false).unwrap();
        let data = build_duality(&m, t, 8).unwrap();
        let h = data.h.complex.cohomology(8).unwrap();
        assert_eq!(h.betti_vec(), vec![1, 0, 0, 0, 0, 0, 0, 0]);
        // ψ(ξ⊗1) = ω(ξ)
        let w = &data.psi0.weil;
        let omega = data.transgression.omega_in(0, w);
        let col = data.psi_ambient.apply(3, &SparseVec::unit(data.h.complex.dims().dim(3), 0));
        let unit_m = SparseVec::unit(1, 0);
        assert_eq!(col, data.psi0.wm_basis.tensor_vectors(3, &omega, 3, &unit_m));
    }

    #[test]
    fn su2_trivial_and_exterior_pass() {
        let g = alg("su2");
        for m in [trivial_module(&g), exterior_model(&g)] {
            let r = verify_duality(&m, 6, false).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.betti_agree && r.d_h_squared_zero && r.contraction_compatible);
        }
    }

    #[test]
    fn corrupted_transgression_fails_only_when_nonabelian() {
        let g = alg("su2");
        let r = verify_duality(&trivial_module(&g), 6, true).unwrap();
        assert!(!r.psi.chain_map.pass);
        let w = r.psi.chain_map.witness.unwrap();
        assert_eq!(w.degree, 3);
        let g = alg("abelian:2");
        let r = verify_duality(&exterior_model(&g), 4, true).unwrap();
        assert!(r.pass);
    }
}
