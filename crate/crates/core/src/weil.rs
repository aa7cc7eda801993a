//! The Weil algebra `W(g) = S•g* ⊗ Λ•g*`, its structure maps, the twist
//! `T = exp(-𝐢)` on `Λ•g* ⊗ M`, horizontal and basic elements, and the
//! isomorphism `ψ₀` from the Cartan model onto the basic subcomplex.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{check_chain_map, ChainCheck, Complex};
use crate::equivariant::{s_invariants, CartanModel};
use crate::graded::{tensor_op, Dims, GradedSpace, LinMap, TensorBasis};
use crate::kg::{exterior_contraction, exterior_labels, exterior_model, tensor_module, chevalley_eilenberg, KgModule};
use crate::lie::LieAlgebra;
use crate::linalg::{q, qf, rank, Matrix, Rational, SparseVec, Subspace};
use crate::monomial::{ExteriorBasis, LambdaMonomial, SymBasis, SymMonomial};
use crate::signs::{pairing, twist_closed_form};

/// A Weil algebra element as monomial terms `c · s ⊗ w`.
pub type WeilTerms = Vec<(SymMonomial, LambdaMonomial, Rational)>;

/// Graded-space helpers for the symmetric algebra (generators in degree 2).
pub struct SymOps<'a> {
    pub sym: &'a SymBasis,
    pub dims: Dims,
}

impl<'a> SymOps<'a> {
    pub fn new(sym: &'a SymBasis) -> Self {
        Self { sym, dims: sym.dims() }
    }

    pub fn space(&self, names: &[String]) -> GradedSpace {
        let labels = self
            .dims
            .degrees()
            .map(|d| {
                if d % 2 == 1 {
                    Vec::new()
                } else {
                    self.sym.degree(d as usize / 2).iter().map(|m| m.label(names)).collect()
                }
            })
            .collect();
        GradedSpace::new(0, labels)
    }

    /// Multiplication by an element `x` of `S^b`.
    pub fn multiplication(&self, x: &SparseVec, b: usize) -> LinMap {
        LinMap::from_blocks(&self.dims, &self.dims, 2 * b as i32, |d| {
            let rows = self.dims.dim(d + 2 * b as i32);
            let cols = self.dims.dim(d);
            if d % 2 == 1 {
                return Matrix::zeros(rows, cols);
            }
            self.sym
                .multiplication(x, b, d as usize / 2)
                .unwrap_or_else(|| Matrix::zeros(rows, cols))
        })
    }

    pub fn generator(&self, k: usize) -> LinMap {
        let n = self.sym.generators();
        let x = SparseVec::unit(self.sym.degree(1).len(), self.sym.index_of(&SymMonomial::generator(n, k)));
        self.multiplication(&x, 1)
    }

    /// Extension of a linear map on generators to an even derivation.
    pub fn derivation(&self, gen: &Matrix) -> LinMap {
        LinMap::from_blocks(&self.dims, &self.dims, 0, |d| {
            if d % 2 == 1 {
                Matrix::zeros(0, 0)
            } else {
                self.sym.derivation(gen, d as usize / 2)
            }
        })
    }
}

/// Exterior algebra operators as graded maps on `Λ•g*`.
pub fn exterior_wedge(ext: &ExteriorBasis, x: LambdaMonomial, right: bool) -> LinMap {
    let dims = ext.dims();
    let p = x.degree();
    let v = ext.vector(x, q(1));
    LinMap::from_blocks(&dims, &dims, p as i32, |d| ext.multiplication(&v, p, d as usize, right))
}

pub fn exterior_i(ext: &ExteriorBasis, k: usize) -> LinMap {
    let dims = ext.dims();
    LinMap::from_blocks(&dims, &dims, -1, |d| exterior_contraction(ext, k, d as usize))
}

/// `W(g)` in total degrees `0..=top`, as a K(g) module.
#[derive(Clone, Debug)]
pub struct WeilAlgebra {
    g: Arc<LieAlgebra>,
    sym: SymBasis,
    ext: ExteriorBasis,
    basis: TensorBasis,
    module: KgModule,
}

/// `d_W = 1⊗d_Λ + PAIRING·Σ_k λ^k· ⊗ i_k + PAIRING·Σ_k L_k ⊗ λ^k∧`.
pub fn weil_model(g: &Arc<LieAlgebra>, top: i32) -> WeilAlgebra {
    let n = g.dim();
    let sym = SymBasis::new(n, (top.max(0) / 2) as usize);
    let ext = ExteriorBasis::new(n);
    let sops = SymOps::new(&sym);
    let edims = ext.dims();
    let basis = TensorBasis::new(&sops.dims, &edims, top);
    let names = g.dual_labels();
    let lspace = GradedSpace::new(0, exterior_labels(g, &ext));
    let space = GradedSpace::new(0, basis.labels(&sops.space(&names), &lspace));
    let d_lambda = LinMap::from_blocks(&edims, &edims, 1, |p| chevalley_eilenberg(g, &ext, p as usize));
    let coad = g.coad_matrices();
    let one = |_: i32, _: i32| 1;
    let terms: Vec<LinMap> = (0..n)
        .into_par_iter()
        .map(|k| {
            let contract = tensor_op(&basis, Some(&sops.generator(k)), Some(&exterior_i(&ext, k)), one);
            let wedge = exterior_wedge(&ext, LambdaMonomial::generator(k), false);
            let act = tensor_op(&basis, Some(&sops.derivation(&coad[k])), Some(&wedge), one);
            contract.add(&act).scale(&pairing())
        })
        .collect();
    let mut d = tensor_op(&basis, None, Some(&d_lambda), one);
    for t in &terms {
        d = d.add(t);
    }
    let complex = Complex::new_unchecked(space, d, Some(top - 1));
    let i_ops = (0..n).map(|k| tensor_op(&basis, None, Some(&exterior_i(&ext, k)), one)).collect();
    let module = KgModule::new(g.clone(), complex, i_ops).expect("Weil model shapes");
    WeilAlgebra { g: g.clone(), sym, ext, basis, module }
}

impl WeilAlgebra {
    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.g
    }

    pub fn module(&self) -> &KgModule {
        &self.module
    }

    pub fn sym(&self) -> &SymBasis {
        &self.sym
    }

    pub fn ext(&self) -> &ExteriorBasis {
        &self.ext
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn top(&self) -> i32 {
        self.module.hi()
    }

    pub fn dims(&self) -> &Dims {
        self.module.dims()
    }

    /// Index of `s ⊗ w` in its total degree, if inside the window.
    pub fn index(&self, s: &SymMonomial, w: LambdaMonomial) -> Option<(i32, usize)> {
        let p = 2 * s.poly_degree() as i32;
        let t = p + w.degree() as i32;
        if t > self.top() || s.poly_degree() > self.sym.max_poly_degree() {
            return None;
        }
        let i = self.basis.index(p, self.sym.index_of(s), t, self.ext.index_of(w))?;
        Some((t, i))
    }

    /// Vector of a homogeneous element of degree `deg`. Terms outside the
    /// window or of the wrong degree are rejected.
    pub fn from_terms(&self, deg: i32, terms: &[(SymMonomial, LambdaMonomial, Rational)]) -> Option<SparseVec> {
        let mut raw = Vec::new();
        for (s, w, c) in terms {
            let (t, i) = self.index(s, *w)?;
            if t != deg {
                return None;
            }
            raw.push((i, c.clone()));
        }
        Some(SparseVec::from_entries(self.dims().dim(deg), raw))
    }

    pub fn terms(&self, deg: i32, v: &SparseVec) -> WeilTerms {
        v.entries()
            .iter()
            .map(|(i, c)| {
                let (p, a, b) = self.basis.split(deg, *i);
                let s = self.sym.degree(p as usize / 2)[a].clone();
                let w = self.ext.degree((deg - p) as usize)[b];
                (s, w, c.clone())
            })
            .collect()
    }

    pub fn format(&self, deg: i32, v: &SparseVec) -> String {
        self.module.space().format(deg, v)
    }

    /// Product `x · y` for `x` of degree `dx` and `y` of degree `dy`;
    /// components beyond the window are dropped.
    pub fn multiply(&self, dx: i32, x: &SparseVec, dy: i32, y: &SparseVec) -> SparseVec {
        let t = dx + dy;
        let rows = self.dims().dim(t);
        let tx = self.terms(dx, x);
        let ty = self.terms(dy, y);
        let mut raw = Vec::new();
        if rows > 0 {
            for (s1, w1, c1) in &tx {
                for (s2, w2, c2) in &ty {
                    if let Some((w, sign)) = w1.wedge(*w2) {
                        if let Some((_, i)) = self.index(&s1.times(s2), w) {
                            raw.push((i, c1 * c2 * q(sign)));
                        }
                    }
                }
            }
        }
        SparseVec::from_entries(rows, raw)
    }

    /// Left multiplication by `x` (degree `dx`) as a graded map.
    pub fn left_multiplication(&self, dx: i32, x: &SparseVec) -> LinMap {
        let dims = self.dims().clone();
        LinMap::from_columns(&dims, &dims, dx, |d, i| {
            self.multiply(dx, x, d, &SparseVec::unit(dims.dim(d), i))
        })
    }

    /// `W → Λ•g*`, killing positive symmetric powers.
    pub fn restriction(&self) -> LinMap {
        let edims = self.ext.dims();
        LinMap::from_columns(self.dims(), &edims, 0, |t, i| {
            let (p, _, b) = self.basis.split(t, i);
            let rows = edims.dim(t);
            if p == 0 {
                SparseVec::unit(rows, b)
            } else {
                SparseVec::zero(rows)
            }
        })
    }

    /// `(S•g*)^g` with zero differential, in degrees `0..=top`.
    pub fn invariant_polynomials(&self) -> (Complex, Vec<Vec<SparseVec>>) {
        let names = self.g.dual_labels();
        let mut labels = Vec::new();
        let mut per = Vec::new();
        for d in 0..=self.top() {
            if d % 2 == 1 {
                labels.push(Vec::new());
                per.push(Vec::new());
                continue;
            }
            let a = d as usize / 2;
            let inv = s_invariants(&self.g, &self.sym, a);
            labels.push(inv.iter().map(|v| self.sym.format(v, a, &names)).collect());
            per.push(inv);
        }
        let space = GradedSpace::new(0, labels);
        let dims = space.dims().clone();
        let c = Complex::new_unchecked(space, LinMap::zero(&dims, &dims, 1), Some(self.top()));
        (c, per)
    }

    /// `s ↦ s ⊗ 1` from the invariant polynomials.
    pub fn inclusion(&self, inv: &Complex, per: &[Vec<SparseVec>]) -> LinMap {
        LinMap::from_columns(inv.dims(), self.dims(), 0, |d, i| {
            let a = d as usize / 2;
            let terms: WeilTerms = per[d as usize][i]
                .entries()
                .iter()
                .map(|(j, c)| (self.sym.degree(a)[*j].clone(), LambdaMonomial::ONE, c.clone()))
                .collect();
            self.from_terms(d, &terms).expect("invariant polynomial inside the window")
        })
    }

    /// Invariant polynomial `s ∈ S^a` as the element `s ⊗ 1`.
    pub fn sym_element(&self, a: usize, s: &SparseVec) -> SparseVec {
        let terms: WeilTerms = s
            .entries()
            .iter()
            .map(|(j, c)| (self.sym.degree(a)[*j].clone(), LambdaMonomial::ONE, c.clone()))
            .collect();
        self.from_terms(2 * a as i32, &terms).expect("polynomial inside the window")
    }

    /// Exterior element `ξ ∈ Λ^p` as `1 ⊗ ξ`.
    pub fn lambda_element(&self, p: usize, xi: &SparseVec) -> SparseVec {
        let one = SymMonomial::one(self.g.dim());
        let terms: WeilTerms =
            xi.entries().iter().map(|(j, c)| (one.clone(), self.ext.degree(p)[*j], c.clone())).collect();
        self.from_terms(p as i32, &terms).expect("exterior element inside the window")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureMapsReport {
    pub inclusion: ChainCheck,
    pub restriction: ChainCheck,
    pub inclusion_commutes_with_i: bool,
    pub restriction_commutes_with_i: bool,
}

/// Checks that `(S•g*)^g → W(g)` and `W(g) → Λ•g*` are K(g) morphisms.
pub fn weil_structure_maps(w: &WeilAlgebra) -> StructureMapsReport {
    let (inv, per) = w.invariant_polynomials();
    let inc = w.inclusion(&inv, &per);
    let res = w.restriction();
    let lam = exterior_model(w.algebra());
    let n = w.algebra().dim();
    let inc_i = (0..n).all(|k| w.module().i(k).compose(&inc).is_zero());
    let res_i = (0..n).all(|k| res.compose(w.module().i(k)) == lam.i(k).compose(&res));
    StructureMapsReport {
        inclusion: check_chain_map(&inc, &inv, w.module().complex()).expect("shapes"),
        restriction: check_chain_map(&res, w.module().complex(), lam.complex()).expect("shapes"),
        inclusion_commutes_with_i: inc_i,
        restriction_commutes_with_i: res_i,
    }
}

/// `𝐢`, `T = exp(-𝐢)` and `T⁻¹ = exp(𝐢)` on `Λ•g* ⊗ M`.
#[derive(Clone, Debug)]
pub struct Twist {
    pub ext: ExteriorBasis,
    pub lm: KgModule,
    pub basis: TensorBasis,
    pub bold_i: LinMap,
    pub t: LinMap,
    pub t_inv: LinMap,
}

fn exp_series(x: &LinMap, sign: i64, terms: usize) -> LinMap {
    let mut acc = LinMap::identity(x.src());
    let mut power = LinMap::identity(x.src());
    let mut fact = 1i64;
    for n in 1..=terms {
        power = x.compose(&power);
        fact *= n as i64;
        let c = qf(if n % 2 == 1 { sign } else { 1 }, fact);
        acc = acc.add(&power.scale(&c));
    }
    acc
}

/// `𝐢(ξ⊗m) = PAIRING·Σ_k ξ∧λ^k ⊗ i_k m`.
pub fn twist_operators(m: &KgModule) -> Twist {
    let g = m.algebra();
    let ext = ExteriorBasis::new(g.dim());
    let lm = tensor_module(&exterior_model(g), m, None).expect("same algebra");
    let basis = TensorBasis::new(&ext.dims(), m.dims(), lm.hi());
    let parts: Vec<LinMap> = (0..g.dim())
        .into_par_iter()
        .map(|k| {
            let wedge = exterior_wedge(&ext, LambdaMonomial::generator(k), true);
            tensor_op(&basis, Some(&wedge), Some(m.i(k)), |_, _| 1)
        })
        .collect();
    let dims = lm.dims().clone();
    let bold_i = LinMap::linear_combination(&dims, &dims, 0, parts.iter().map(|p| (pairing(), p)));
    // 𝐢 has shift 0 but raises the exterior degree, so 𝐢^{dim g + 1} = 0
    let t = exp_series(&bold_i, -1, g.dim());
    let t_inv = exp_series(&bold_i, 1, g.dim());
    Twist { ext, lm, basis, bold_i, t, t_inv }
}

impl Twist {
    pub fn nilpotency_power(&self) -> LinMap {
        let mut p = LinMap::identity(self.bold_i.src());
        for _ in 0..=self.ext.generators() {
            p = self.bold_i.compose(&p);
        }
        p
    }

    /// `Σ_I (-1)^{q(q+1)/2} PAIRING^q ξ∧λ^I ⊗ i_{i_1}∘…∘i_{i_q} m`.
    pub fn closed_form(&self, m: &KgModule) -> LinMap {
        let dims = self.lm.dims().clone();
        let mut acc = LinMap::zero(&dims, &dims, 0);
        for qd in 0..=self.ext.generators() {
            let c = twist_closed_form(qd);
            for &mono in self.ext.degree(qd) {
                let wedge = exterior_wedge(&self.ext, mono, true);
                let contr = m.multivector_contraction(&[(mono, q(1))]);
                acc = acc.axpy(&c, &tensor_op(&self.basis, Some(&wedge), Some(&contr), |_, _| 1));
            }
        }
        acc
    }

    /// Identity A: `i_μ ∘ T = T ∘ (i_μ ⊗ 1)` for every `μ`.
    pub fn identity_a(&self) -> Vec<bool> {
        (0..self.ext.generators())
            .map(|mu| {
                let lhs = self.lm.i(mu).compose(&self.t);
                let rhs = self.t.compose(&tensor_op(&self.basis, Some(&exterior_i(&self.ext, mu)), None, |_, _| 1));
                lhs == rhs
            })
            .collect()
    }

    /// Identity B: `d ∘ T = T ∘ (d + PAIRING·Σ_k λ^k∧ ⊗ L_k)`.
    pub fn identity_b(&self, m: &KgModule) -> bool {
        let mut twisted = self.lm.d().clone();
        for k in 0..self.ext.generators() {
            let wedge = exterior_wedge(&self.ext, LambdaMonomial::generator(k), false);
            let term = tensor_op(&self.basis, Some(&wedge), Some(m.l(k)), |_, _| 1);
            twisted = twisted.axpy(&pairing(), &term);
        }
        let lhs = self.lm.d().compose(&self.t);
        let rhs = self.t.compose(&twisted);
        let keep = |q: i32| self.lm.exact_through().map_or(true, |e| q <= e);
        lhs.sub(&rhs).first_nonzero_where(keep).is_none()
    }

    /// `T(1 ⊗ m)` for a basis vector `m` of degree `d`.
    pub fn on_unit(&self, d: i32, i: usize) -> SparseVec {
        let idx = self.basis.index(0, 0, d, i).expect("1 ⊗ m lies in the window");
        self.t.block(d).column(idx)
    }
}

/// Horizontal subspaces (killed by every `i_k`) and the basic subcomplex
/// (also killed by every `i_k ∘ d`) in degrees where `d` is exact.
pub fn horizontal_basic(m: &KgModule) -> (Vec<Subspace>, Complex) {
    let (lo, basic) = basic_subspaces(m);
    let top = lo + basic.len() as i32 - 1;
    let n = m.algebra().dim();
    let hor = (lo..=top)
        .map(|d| {
            let ib: Vec<Matrix> = (0..n).map(|k| m.i(k).block(d)).collect();
            Subspace::kernel(&Matrix::vstack(&ib.iter().collect::<Vec<_>>(), m.dims().dim(d)))
        })
        .collect();
    let labels = basic
        .iter()
        .zip(lo..)
        .map(|(s, d)| s.basis().iter().map(|v| m.space().format(d, v)).collect())
        .collect();
    let exact = m.exact_through().map(|_| top - 1);
    let c = m
        .complex()
        .subcomplex(&basic, labels, exact)
        .expect("basic elements form a subcomplex");
    (hor, c)
}

/// `ψ₀(a ⊗ m) = a · T(1 ⊗ m)` from the Cartan model of `M` into `W(g) ⊗ M`.
#[derive(Clone, Debug)]
pub struct Psi0 {
    pub weil: WeilAlgebra,
    pub wm: KgModule,
    pub wm_basis: TensorBasis,
    /// Map into the ambient `W(g) ⊗ M` chain groups.
    pub map: LinMap,
}

/// Embeds `s ⊗ (ξ ⊗ m)` into `W ⊗ M` as `(s ⊗ ξ) ⊗ m`.
fn embed_s_lm(
    w: &WeilAlgebra,
    wm_basis: &TensorBasis,
    s: &SymMonomial,
    xi: LambdaMonomial,
    md: i32,
    mi: usize,
) -> Option<usize> {
    let (wd, wi) = w.index(s, xi)?;
    wm_basis.index(wd, wi, wd + md, mi)
}

pub fn psi0(cartan: &CartanModel, weil: WeilAlgebra, wm: KgModule) -> Psi0 {
    let m = cartan.module();
    let tw = twist_operators(m);
    let wm_basis = TensorBasis::new(weil.dims(), m.dims(), wm.hi());
    let sym = cartan.sym();
    let cdims = cartan.complex().dims().clone();
    let map = LinMap::from_columns(&cdims, wm.dims(), 0, |d, i| {
        let rows = wm.dims().dim(d);
        let amb = cartan.ambient_vector(d, i);
        let mut raw = Vec::new();
        for (idx, c) in amb.entries() {
            let (p, a, b) = cartan.basis().split(d, *idx);
            let s = &sym.degree(p as usize / 2)[a];
            let md = d - p;
            let img = tw.on_unit(md, b);
            for (j, c2) in img.entries() {
                let (lp, xi_i, mi) = tw.basis.split(md, *j);
                let xi = tw.ext.degree(lp as usize)[xi_i];
                if let Some(t) = embed_s_lm(&weil, &wm_basis, s, xi, md - lp, mi) {
                    raw.push((t, c * c2));
                }
            }
        }
        SparseVec::from_entries(rows, raw)
    });
    Psi0 { weil, wm, wm_basis, map }
}

/// Cartan model and `ψ₀` with both sides built through degree `top`.
pub fn psi0_for(m: &KgModule, top: i32) -> Result<(CartanModel, Psi0), crate::equivariant::EquivariantError> {
    let cartan = crate::equivariant::cartan_model(m, top)?;
    let weil = weil_model(m.algebra(), top - m.lo());
    let wm = tensor_module(weil.module(), m, Some(top)).expect("same algebra");
    let p = psi0(&cartan, weil, wm);
    Ok((cartan, p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Psi0Degree {
    pub degree: i32,
    pub cartan_dim: usize,
    pub basic_dim: usize,
    pub rank: usize,
    pub lands_in_basic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Psi0Report {
    pub degrees: Vec<Psi0Degree>,
    pub bijective: bool,
    pub horizontal: bool,
    pub chain_map: ChainCheck,
    pub s_linear: bool,
    pub pass: bool,
}

impl Psi0 {
    /// Left multiplication by `s ⊗ 1` on `W ⊗ M`.
    pub fn s_multiplication(&self, a: usize, s: &SparseVec) -> LinMap {
        let ws = self.weil.sym_element(a, s);
        let mult = self.weil.left_multiplication(2 * a as i32, &ws);
        tensor_op(&self.wm_basis, Some(&mult), None, |_, _| 1)
    }

    /// Bijectivity onto the basic subcomplex, horizontality, chain-map
    /// property and S•-linearity, in degrees `<= through`.
    pub fn verify(&self, cartan: &CartanModel, through: i32) -> Psi0Report {
        let (_, basic_sub) = basic_subspaces(&self.wm);
        let degs: Vec<i32> = (cartan.complex().lo()..=through).collect();
        let degrees: Vec<Psi0Degree> = degs
            .par_iter()
            .map(|&d| {
                let block = self.map.block(d);
                let sub = basic_sub.get((d - self.wm.lo()) as usize);
                let lands = sub.map_or(block.cols() == 0, |s| block.columns().iter().all(|c| s.contains(c)));
                Psi0Degree {
                    degree: d,
                    cartan_dim: block.cols(),
                    basic_dim: sub.map_or(0, Subspace::dim),
                    rank: rank(&block),
                    lands_in_basic: lands,
                }
            })
            .collect();
        let bijective = degrees
            .iter()
            .all(|x| x.lands_in_basic && x.rank == x.cartan_dim && x.rank == x.basic_dim);
        let n = self.wm.algebra().dim();
        let keep = |d: i32| d <= through;
        let horizontal = (0..n).all(|k| self.wm.i(k).compose(&self.map).first_nonzero_where(keep).is_none());
        let chain_map = check_chain_map(&self.map, cartan.complex(), self.wm.complex()).expect("shapes");
        let mut s_linear = true;
        for a in 1..=(through.max(0) as usize / 2) {
            for s in cartan.s_upper(a) {
                let lhs = self.map.compose(&cartan.s_action(a, &s));
                let rhs = self.s_multiplication(a, &s).compose(&self.map);
                if lhs.sub(&rhs).first_nonzero_where(|d| d + 2 * a as i32 <= through).is_some() {
                    s_linear = false;
                }
            }
        }
        let pass = bijective && horizontal && chain_map.pass && s_linear;
        Psi0Report { degrees, bijective, horizontal, chain_map, s_linear, pass }
    }
}

/// Basic subspaces of `M` per degree (see [`horizontal_basic`]).
pub fn basic_subspaces(m: &KgModule) -> (i32, Vec<Subspace>) {
    let top = m.exact_through().map_or(m.hi(), |e| e.min(m.hi()));
    let n = m.algebra().dim();
    let subs = (m.lo()..=top)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&d| {
            let cols = m.dims().dim(d);
            let mut mats: Vec<Matrix> = (0..n).map(|k| m.i(k).block(d)).collect();
            mats.extend((0..n).map(|k| &m.i(k).block(d + 1) * &m.d().block(d)));
            Subspace::kernel(&Matrix::vstack(&mats.iter().collect::<Vec<_>>(), cols))
        })
        .collect();
    (m.lo(), subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::trivial_module;

    fn su2() -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::builtin("su2").unwrap())
    }

    fn lam(idx: &[usize]) -> LambdaMonomial {
        LambdaMonomial::from_indices(idx).unwrap().0
    }

    #[test]
    fn weil_golden_differentials() {
        let g = su2();
        let w = weil_model(&g, 4);
        let one = SymMonomial::one(3);
        let istar = SymMonomial::generator(3, 0);
        let x = w.from_terms(1, &[(one.clone(), lam(&[0]), q(1))]).unwrap();
        let dx = w.module().d().apply(1, &x);
        let expect = w
            .from_terms(2, &[(one.clone(), lam(&[1, 2]), q(2)), (istar.clone(), LambdaMonomial::ONE, q(1))])
            .unwrap();
        assert_eq!(dx, expect);
        let y = w.from_terms(2, &[(istar, LambdaMonomial::ONE, q(1))]).unwrap();
        let dy = w.module().d().apply(2, &y);
        let expect = w
            .from_terms(
                3,
                &[
                    (SymMonomial::generator(3, 2), lam(&[1]), q(2)),
                    (SymMonomial::generator(3, 1), lam(&[2]), q(-2)),
                ],
            )
            .unwrap();
        assert_eq!(dy, expect);
    }

    #[test]
    fn weil_validates_and_is_acyclic() {
        let g = su2();
        let w = weil_model(&g, 6);
        assert!(w.module().validate().pass);
        let h = w.module().complex().cohomology(6).unwrap();
        assert_eq!(h.betti_vec(), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn multiplication_is_a_derivation_target() {
        let g = su2();
        let w = weil_model(&g, 5);
        let d = w.module().d();
        let one = SymMonomial::one(3);
        let x = w.from_terms(1, &[(one.clone(), lam(&[0]), q(1))]).unwrap();
        let y = w.from_terms(2, &[(SymMonomial::generator(3, 1), LambdaMonomial::ONE, q(1))]).unwrap();
        let lhs = d.apply(3, &w.multiply(1, &x, 2, &y));
        let rhs = &w.multiply(2, &d.apply(1, &x), 2, &y) - &w.multiply(1, &x, 3, &d.apply(2, &y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_trivial_module_is_identity() {
        let g = su2();
        let tw = twist_operators(&trivial_module(&g));
        assert_eq!(tw.t, LinMap::identity(tw.lm.dims()));
    }

    #[test]
    fn twist_identities_on_exterior() {
        let g = su2();
        let m = exterior_model(&g);
        let tw = twist_operators(&m);
        assert!(tw.nilpotency_power().is_zero());
        assert_eq!(tw.t.compose(&tw.t_inv), LinMap::identity(tw.lm.dims()));
        assert_eq!(tw.closed_form(&m), tw.t);
        assert!(tw.identity_a().iter().all(|&b| b));
        assert!(tw.identity_b(&m));
    }

    #[test]
    fn psi0_lemma_small_window() {
        let g = su2();
        for m in [trivial_module(&g), exterior_model(&g)] {
            let (cartan, p) = psi0_for(&m, 6).unwrap();
            let r = p.verify(&cartan, 5);
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn psi0_leading_terms() {
        let g = su2();
        let m = exterior_model(&g);
        let tw = twist_operators(&m);
        // T(1⊗m) = 1⊗m - Σ_k λ^k ⊗ ι_k m - …, with ι the plain interior product
        // (i_k = PAIRING·ι_k), so T(1⊗i*) = 1⊗i* - i*⊗1
        let img = tw.on_unit(1, 0);
        let mut expect = SparseVec::zero(img.dim());
        expect = expect.axpy(&q(1), &SparseVec::unit(img.dim(), tw.basis.index(0, 0, 1, 0).unwrap()));
        expect = expect.axpy(&q(-1), &SparseVec::unit(img.dim(), tw.basis.index(1, 0, 1, 0).unwrap()));
        assert_eq!(img, expect);
    }

    #[test]
    fn structure_maps_are_morphisms() {
        let g = su2();
        let r = weil_structure_maps(&weil_model(&g, 5));
        assert!(r.inclusion.pass && r.restriction.pass);
        assert!(r.inclusion_commutes_with_i && r.restriction_commutes_with_i);
    }
}
