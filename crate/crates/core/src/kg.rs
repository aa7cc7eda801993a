//! Differential graded modules with contractions (objects of K(g)): the
//! identity validator and the standard constructors.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, ComplexError, Witness};
use crate::graded::{tensor_op, Dims, GradedSpace, LinMap, TensorBasis};
use crate::lie::{invariant_vectors, LieAlgebra, LieError};
use crate::linalg::{format_rational, parse_rational, q, Matrix, Rational, SparseVec};
use crate::monomial::{ExteriorBasis, LambdaMonomial, SymBasis, SymMonomial};
use crate::signs::{koszul, pairing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KgError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("module file: {0}")]
    File(String),
    #[error("module fails the K(g) identities: {0}")]
    Invalid(String),
    #[error("modules are over different Lie algebras")]
    AlgebraMismatch,
}

/// A complex with contractions `i_k`, one per basis vector of `g`; the Lie
/// derivatives `L_k = d i_k + i_k d` are derived.
#[derive(Clone, Debug)]
pub struct KgModule {
    algebra: Arc<LieAlgebra>,
    complex: Complex,
    i_ops: Vec<LinMap>,
    l_ops: Vec<LinMap>,
}

impl KgModule {
    pub fn new(algebra: Arc<LieAlgebra>, complex: Complex, i_ops: Vec<LinMap>) -> Result<Self, KgError> {
        if i_ops.len() != algebra.dim() {
            return Err(KgError::Shape(format!(
                "{} contractions for an algebra of dimension {}",
                i_ops.len(),
                algebra.dim()
            )));
        }
        for i in &i_ops {
            if i.src() != complex.dims() || i.tgt() != complex.dims() || i.shift() != -1 {
                return Err(KgError::Shape("contraction does not match the complex".into()));
            }
        }
        let d = complex.d();
        let l_ops = i_ops.par_iter().map(|i| d.compose(i).add(&i.compose(d))).collect();
        Ok(Self { algebra, complex, i_ops, l_ops })
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &GradedSpace {
        self.complex.space()
    }

    pub fn dims(&self) -> &Dims {
        self.complex.dims()
    }

    pub fn d(&self) -> &LinMap {
        self.complex.d()
    }

    pub fn i(&self, k: usize) -> &LinMap {
        &self.i_ops[k]
    }

    pub fn l(&self, k: usize) -> &LinMap {
        &self.l_ops[k]
    }

    pub fn i_ops(&self) -> &[LinMap] {
        &self.i_ops
    }

    pub fn l_ops(&self) -> &[LinMap] {
        &self.l_ops
    }

    pub fn lo(&self) -> i32 {
        self.complex.lo()
    }

    pub fn hi(&self) -> i32 {
        self.complex.hi()
    }

    /// Degrees where `L` is correct: those where `d` is exact.
    pub fn exact_through(&self) -> Option<i32> {
        self.complex.exact_through()
    }

    /// Composite contraction `i_{k_1} ∘ … ∘ i_{k_p}` for a multivector given
    /// by its monomial coefficients.
    pub fn multivector_contraction(&self, x: &[(LambdaMonomial, Rational)]) -> LinMap {
        let p = x.first().map_or(0, |(m, _)| m.degree() as i32);
        let mut acc = LinMap::zero(self.dims(), self.dims(), -p);
        for (mono, c) in x {
            let mut op = LinMap::identity(self.dims());
            for k in mono.indices().into_iter().rev() {
                op = self.i_ops[k].compose(&op);
            }
            acc = acc.axpy(c, &op);
        }
        acc
    }

    /// Replaces one contraction; the result is not re-validated.
    pub fn with_contraction(&self, k: usize, op: LinMap) -> Result<KgModule, KgError> {
        let mut i_ops = self.i_ops.clone();
        i_ops[k] = op;
        KgModule::new(self.algebra.clone(), self.complex.clone(), i_ops)
    }

    /// Runs every identity family on every basis vector of the window.
    pub fn validate(&self) -> KgReport {
        validate_kg(self)
    }

    pub fn to_file(&self) -> ModuleFile {
        let space = self.space();
        let mut degrees = BTreeMap::new();
        for d in self.dims().degrees() {
            degrees.insert(d.to_string(), space.labels(d).to_vec());
        }
        let entries = |m: &LinMap| -> Vec<MatrixEntry> {
            let mut out = Vec::new();
            for d in m.src().degrees() {
                let b = m.block(d);
                for (row, r) in b.row_vecs().iter().enumerate() {
                    for (col, c) in r.entries() {
                        out.push(MatrixEntry { deg: d, row, col: *col, c: format_rational(c) });
                    }
                }
            }
            out
        };
        let mut i = BTreeMap::new();
        for (k, op) in self.i_ops.iter().enumerate() {
            let e = entries(op);
            if !e.is_empty() {
                i.insert(k.to_string(), e);
            }
        }
        ModuleFile { degrees, d: entries(self.d()), i }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub pass: bool,
    /// Number of (operator tuple, degree) blocks compared.
    pub blocks_checked: usize,
    pub operators: Option<Vec<usize>>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KgReport {
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

impl KgReport {
    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub const ID_DD: &str = "d∘d = 0";
pub const ID_CARTAN: &str = "L_k = d∘i_k + i_k∘d";
pub const ID_II: &str = "i_j∘i_k + i_k∘i_j = 0";
pub const ID_LI: &str = "[L_j, i_k] = Σ c^m_jk i_m";
pub const ID_LL: &str = "[L_j, L_k] = Σ c^m_jk L_m";

fn first_defect(
    m: &KgModule,
    defect: &LinMap,
    keep: impl Fn(i32) -> bool,
) -> (usize, Option<Witness>) {
    let space = m.space();
    let degs: Vec<i32> = defect.src().degrees().filter(|&d| keep(d)).collect();
    let found = degs.iter().find_map(|&d| {
        defect.block_ref(d).and_then(Matrix::first_nonzero_column).map(|(j, col)| (d, j, col))
    });
    let w = found.map(|(d, j, col)| Witness {
        degree: d,
        basis_index: j,
        basis_label: space.label(d, j).to_string(),
        defect: space.format(d + defect.shift(), &col),
    });
    (degs.len(), w)
}

fn bracket_combination(m: &KgModule, j: usize, k: usize, ops: &[LinMap], shift: i32) -> LinMap {
    let g = m.algebra();
    LinMap::linear_combination(
        m.dims(),
        m.dims(),
        shift,
        g.bracket_basis(j, k).entries().iter().map(|(t, c)| (c.clone(), &ops[*t])),
    )
}

fn family(
    name: &str,
    pairs: Vec<(usize, usize)>,
    m: &KgModule,
    keep: impl Fn(i32) -> bool + Sync,
    defect: impl Fn(usize, usize) -> LinMap + Sync,
) -> IdentityCheck {
    let results: Vec<(usize, Option<Witness>)> =
        pairs.par_iter().map(|&(j, k)| first_defect(m, &defect(j, k), &keep)).collect();
    let blocks_checked = results.iter().map(|r| r.0).sum();
    let bad = pairs.iter().zip(results).find_map(|(p, (_, w))| w.map(|w| (*p, w)));
    IdentityCheck {
        identity: name.to_string(),
        pass: bad.is_none(),
        blocks_checked,
        operators: bad.as_ref().map(|((j, k), _)| vec![*j, *k]),
        witness: bad.map(|(_, w)| w),
    }
}

/// Checks the five identity families. Identities involving `d` are checked
/// only out of degrees where `d` is exact.
pub fn validate_kg(m: &KgModule) -> KgReport {
    let n = m.algebra().dim();
    let exact = |d: i32| m.exact_through().map_or(true, |e| d <= e);
    let d = m.d();

    let dd = {
        let (blocks, w) = first_defect(m, &d.compose(d), |q| exact(q + 1));
        IdentityCheck { identity: ID_DD.into(), pass: w.is_none(), blocks_checked: blocks, operators: None, witness: w }
    };
    let singles: Vec<(usize, usize)> = (0..n).map(|k| (k, k)).collect();
    let cartan = family(ID_CARTAN, singles, m, exact, |k, _| {
        let i = m.i(k);
        m.l(k).sub(&d.compose(i).add(&i.compose(d)))
    });
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let ii = family(ID_II, upper.clone(), m, |_| true, |j, k| {
        m.i(j).compose(m.i(k)).add(&m.i(k).compose(m.i(j)))
    });
    let all: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).collect();
    let li = family(ID_LI, all, m, exact, |j, k| {
        let comm = m.l(j).compose(m.i(k)).sub(&m.i(k).compose(m.l(j)));
        comm.sub(&bracket_combination(m, j, k, m.i_ops(), -1))
    });
    let ll = family(ID_LL, upper, m, exact, |j, k| {
        let comm = m.l(j).compose(m.l(k)).sub(&m.l(k).compose(m.l(j)));
        comm.sub(&bracket_combination(m, j, k, m.l_ops(), 0))
    });
    let checks = vec![dd, cartan, ii, li, ll];
    let pass = checks.iter().all(|c| c.pass);
    KgReport { checks, pass }
}

/// Labels of exterior monomials in the dual basis.
pub fn exterior_labels(g: &LieAlgebra, ext: &ExteriorBasis) -> Vec<Vec<String>> {
    let names = g.dual_labels();
    (0..=ext.generators()).map(|p| ext.degree(p).iter().map(|m| m.label(&names)).collect()).collect()
}

/// `d_Λ` on `Λ^p g*` as an odd derivation with
/// `d_Λ λ^m = Σ_{i<j} c^m_ij λ^i∧λ^j`.
pub fn chevalley_eilenberg(g: &LieAlgebra, ext: &ExteriorBasis, p: usize) -> Matrix {
    let n = g.dim();
    let rows = ext.degree(p + 1).len();
    let cols: Vec<SparseVec> = ext
        .degree(p)
        .iter()
        .map(|mono| {
            if p == n {
                return SparseVec::zero(rows);
            }
            let idx = mono.indices();
            let mut raw = Vec::new();
            for (pos, &m) in idx.iter().enumerate() {
                let s = koszul(pos as i32);
                for i in 0..n {
                    for j in i + 1..n {
                        let c = g.constant(i, j, m);
                        if c.is_zero() {
                            continue;
                        }
                        let mut rep = idx[..pos].to_vec();
                        rep.push(i);
                        rep.push(j);
                        rep.extend_from_slice(&idx[pos + 1..]);
                        if let Some((z, t)) = LambdaMonomial::from_indices(&rep) {
                            raw.push((ext.index_of(z), &c * q(s * t)));
                        }
                    }
                }
            }
            SparseVec::from_entries(rows, raw)
        })
        .collect();
    Matrix::from_columns(rows, &cols)
}

/// K(g) contraction on `Λ^p g*`: `PAIRING` times the interior product.
pub fn exterior_contraction(ext: &ExteriorBasis, k: usize, p: usize) -> Matrix {
    let rows = if p == 0 { 0 } else { ext.degree(p - 1).len() };
    let cols: Vec<SparseVec> = ext
        .degree(p)
        .iter()
        .map(|mono| match mono.interior(k) {
            Some((z, s)) => SparseVec::from_entries(rows, vec![(ext.index_of(z), pairing() * q(s))]),
            None => SparseVec::zero(rows),
        })
        .collect();
    Matrix::from_columns(rows, &cols)
}

/// Exterior model `Λ•g*` with `d_Λ` and contractions.
pub fn exterior_model(g: &Arc<LieAlgebra>) -> KgModule {
    let ext = ExteriorBasis::new(g.dim());
    let dims = ext.dims();
    let space = GradedSpace::new(0, exterior_labels(g, &ext));
    let d = LinMap::from_blocks(&dims, &dims, 1, |p| chevalley_eilenberg(g, &ext, p as usize));
    let complex = Complex::new_unchecked(space, d, None);
    let i_ops = (0..g.dim())
        .map(|k| LinMap::from_blocks(&dims, &dims, -1, |p| exterior_contraction(&ext, k, p as usize)))
        .collect();
    KgModule::new(g.clone(), complex, i_ops).expect("exterior model shapes")
}

/// The ground field in degree 0.
pub fn trivial_module(g: &Arc<LieAlgebra>) -> KgModule {
    let dims = Dims::new(0, vec![1]);
    let space = GradedSpace::new(0, vec![vec!["1".into()]]);
    let complex = Complex::new_unchecked(space, LinMap::zero(&dims, &dims, 1), None);
    let i_ops = (0..g.dim()).map(|_| LinMap::zero(&dims, &dims, -1)).collect();
    KgModule::new(g.clone(), complex, i_ops).expect("trivial module shapes")
}

/// `V^g` of a representation, placed in degree `grade` with `d = 0` and all
/// contractions zero.
pub fn invariant_rep_module(
    g: &Arc<LieAlgebra>,
    rep: &[Matrix],
    labels: &[String],
    grade: i32,
) -> Result<KgModule, KgError> {
    g.check_representation(rep)?;
    let inv = invariant_vectors(rep);
    let names: Vec<String> = inv
        .iter()
        .map(|v| {
            crate::monomial::format_terms(
                v.entries().iter().map(|(i, c)| (c.clone(), labels[*i].clone())),
            )
        })
        .collect();
    let dims = Dims::new(grade, vec![inv.len()]);
    let space = GradedSpace::new(grade, vec![names]);
    let complex = Complex::new_unchecked(space, LinMap::zero(&dims, &dims, 1), None);
    let i_ops = (0..g.dim()).map(|_| LinMap::zero(&dims, &dims, -1)).collect();
    KgModule::new(g.clone(), complex, i_ops)
}

/// Coadjoint representation extended to `S^a g*`, with monomial labels.
pub fn sym_power_rep(g: &LieAlgebra, a: usize) -> (Vec<Matrix>, Vec<String>) {
    let sym = SymBasis::new(g.dim(), a);
    let reps = g.coad_matrices().iter().map(|c| sym.derivation(c, a)).collect();
    let names = g.dual_labels();
    let labels = sym.degree(a).iter().map(|m| m.label(&names)).collect();
    (reps, labels)
}

/// Exactness bound of a tensor product of two complexes cut at `hi`.
pub fn tensor_exactness(a: &Complex, b: &Complex, hi: i32) -> Option<i32> {
    let mut bound: Option<i32> = None;
    let mut tighten = |x: i32| bound = Some(bound.map_or(x, |y| y.min(x)));
    if let Some(e) = a.exact_through() {
        tighten(e + b.lo());
    }
    if let Some(e) = b.exact_through() {
        tighten(e + a.lo());
    }
    if hi < a.hi() + b.hi() {
        tighten(hi - 1);
    }
    bound
}

/// `M ⊗ N` with Koszul signs, truncated to total degree `<= hi` if given.
pub fn tensor_module(m: &KgModule, n: &KgModule, hi: Option<i32>) -> Result<KgModule, KgError> {
    if m.algebra() != n.algebra() {
        return Err(KgError::AlgebraMismatch);
    }
    let full = m.hi() + n.hi();
    let cut = hi.map_or(full, |h| h.min(full));
    let basis = TensorBasis::new(m.dims(), n.dims(), cut);
    let space = GradedSpace::new(basis.dims().lo(), basis.labels(m.space(), n.space()));
    let leibniz = |a: &LinMap, b: &LinMap| {
        tensor_op(&basis, Some(a), None, |_, _| 1).add(&tensor_op(&basis, None, Some(b), |p, _| koszul(p)))
    };
    let d = leibniz(m.d(), n.d());
    let exact = tensor_exactness(m.complex(), n.complex(), cut);
    let complex = Complex::new_unchecked(space, d, exact);
    let i_ops = (0..m.algebra().dim()).into_par_iter().map(|k| leibniz(m.i(k), n.i(k))).collect();
    KgModule::new(m.algebra().clone(), complex, i_ops)
}

/// Variable names for polynomial forms on `r` variables.
pub fn variable_names(r: usize) -> Vec<String> {
    if r <= 3 {
        ["x", "y", "z"][..r].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=r).map(|i| format!("x{i}")).collect()
    }
}

/// Polynomial differential forms on `r` variables, restricted to the slice
/// where polynomial degree plus form degree equals `slice`. Column `m` of
/// `action[k]` is `λ_k · x_m`.
pub fn polynomial_forms_module(
    g: &Arc<LieAlgebra>,
    action: &[Matrix],
    slice: usize,
) -> Result<KgModule, KgError> {
    g.check_representation(action)?;
    let r = action.first().map_or(0, Matrix::rows);
    let sym = SymBasis::new(r, slice);
    let ext = ExteriorBasis::new(r);
    let top = slice.min(r);
    let vars = variable_names(r);
    let dvars: Vec<String> = vars.iter().map(|v| format!("d{v}")).collect();
    let dims = Dims::new(0, (0..=top).map(|p| sym.degree(slice - p).len() * ext.degree(p).len()).collect());
    let labels: Vec<Vec<String>> = (0..=top)
        .map(|p| {
            let mut out = Vec::new();
            for f in sym.degree(slice - p) {
                for w in ext.degree(p) {
                    let poly = f.label(&vars);
                    out.push(match (p, poly.as_str()) {
                        (0, _) => poly,
                        (_, "1") => w.label(&dvars),
                        _ => format!("{poly} {}", w.label(&dvars)),
                    });
                }
            }
            out
        })
        .collect();
    let index = |p: usize, f: &SymMonomial, w: LambdaMonomial| -> usize {
        sym.index_of(f) * ext.degree(p).len() + ext.index_of(w)
    };
    // element (f, w) in form degree p as a list of its pieces
    let basis_of = |p: usize, i: usize| -> (SymMonomial, LambdaMonomial) {
        let nw = ext.degree(p).len();
        (sym.degree(slice - p)[i / nw].clone(), ext.degree(p)[i % nw])
    };
    let d = LinMap::from_columns(&dims, &dims, 1, |p, i| {
        let p = p as usize;
        let rows = dims.dim(p as i32 + 1);
        let (f, w) = basis_of(p, i);
        let mut raw = Vec::new();
        for (j, &e) in f.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let mut df = f.clone();
            df.0[j] -= 1;
            if let Some((z, s)) = LambdaMonomial::generator(j).wedge(w) {
                raw.push((index(p + 1, &df, z), q(e as i64 * s)));
            }
        }
        SparseVec::from_entries(rows, raw)
    });
    let space = GradedSpace::new(0, labels);
    let complex = Complex::new_unchecked(space, d, None);
    let i_ops = (0..g.dim())
        .map(|k| {
            LinMap::from_columns(&dims, &dims, -1, |p, i| {
                let p = p as usize;
                let rows = if p == 0 { 0 } else { dims.dim(p as i32 - 1) };
                if p == 0 {
                    return SparseVec::zero(0);
                }
                let (f, w) = basis_of(p, i);
                let mut raw = Vec::new();
                for m in w.indices() {
                    let (rest, s) = w.interior(m).expect("index present");
                    for (v, c) in action[k].column(m).entries() {
                        let fv = f.times(&SymMonomial::generator(r, *v));
                        raw.push((index(p - 1, &fv, rest), c * q(s)));
                    }
                }
                SparseVec::from_entries(rows, raw)
            })
        })
        .collect();
    KgModule::new(g.clone(), complex, i_ops)
}

/// On-disk form of a user-supplied module. Entry `(deg, row, col, c)` of an
/// operator of shift `s` maps basis vector `col` of degree `deg` to `c` times
/// basis vector `row` of degree `deg + s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub degrees: BTreeMap<String, Vec<String>>,
    pub d: Vec<MatrixEntry>,
    #[serde(default)]
    pub i: BTreeMap<String, Vec<MatrixEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub deg: i32,
    pub row: usize,
    pub col: usize,
    pub c: String,
}

fn map_from_entries(dims: &Dims, shift: i32, entries: &[MatrixEntry], what: &str) -> Result<LinMap, KgError> {
    let mut per: BTreeMap<i32, Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for e in entries {
        let (rows, cols) = (dims.dim(e.deg + shift), dims.dim(e.deg));
        if e.col >= cols || e.row >= rows {
            return Err(KgError::File(format!(
                "{what}: entry ({}, {}) out of range in degree {}",
                e.row, e.col, e.deg
            )));
        }
        let c = parse_rational(&e.c).ok_or_else(|| KgError::File(format!("{what}: bad rational {:?}", e.c)))?;
        per.entry(e.deg).or_default().push((e.row, e.col, c));
    }
    Ok(LinMap::from_blocks(dims, dims, shift, |d| {
        let rows = dims.dim(d + shift);
        let mut row_entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in per.remove(&d).unwrap_or_default() {
            row_entries[r].push((c, v));
        }
        Matrix::from_rows(
            dims.dim(d),
            row_entries.into_iter().map(|e| SparseVec::from_entries(dims.dim(d), e)).collect(),
        )
    }))
}

impl ModuleFile {
    /// Builds and validates the module.
    pub fn load(&self, g: &Arc<LieAlgebra>) -> Result<KgModule, KgError> {
        let mut by_deg = BTreeMap::new();
        for (k, v) in &self.degrees {
            let d: i32 = k.parse().map_err(|_| KgError::File(format!("bad degree key {k:?}")))?;
            by_deg.insert(d, v.clone());
        }
        let (Some(&lo), Some(&hi)) = (by_deg.keys().next(), by_deg.keys().last()) else {
            return Err(KgError::File("no degrees".into()));
        };
        let labels: Vec<Vec<String>> = (lo..=hi).map(|d| by_deg.get(&d).cloned().unwrap_or_default()).collect();
        let space = GradedSpace::new(lo, labels);
        let dims = space.dims().clone();
        let d = map_from_entries(&dims, 1, &self.d, "d")?;
        let mut i_ops = vec![LinMap::zero(&dims, &dims, -1); g.dim()];
        for (k, entries) in &self.i {
            let idx: usize = k.parse().map_err(|_| KgError::File(format!("bad contraction key {k:?}")))?;
            if idx >= g.dim() {
                return Err(KgError::File(format!("contraction index {idx} out of range")));
            }
            i_ops[idx] = map_from_entries(&dims, -1, entries, &format!("i[{idx}]"))?;
        }
        let module = KgModule::new(g.clone(), Complex::new_unchecked(space, d, None), i_ops)?;
        let report = module.validate();
        if let Some(bad) = report.failures().first() {
            return Err(KgError::Invalid(bad.identity.clone()));
        }
        Ok(module)
    }

    pub fn from_json(text: &str) -> Result<Self, KgError> {
        serde_json::from_str(text)
            .map_err(|e| KgError::File(format!("{e} (line {}, column {})", e.line(), e.column())))
    }
}

/// Sum `Σ_k λ^k ∧ L_k(x)` on the exterior model, as a map `Λ^p → Λ^{p+1}`.
pub fn wedge_lie_sum(m: &KgModule, ext: &ExteriorBasis) -> LinMap {
    let n = m.algebra().dim();
    let dims = m.dims().clone();
    let mut acc = LinMap::zero(&dims, &dims, 1);
    for k in 0..n {
        let gen = ext.vector(LambdaMonomial::generator(k), q(1));
        let wedge = LinMap::from_blocks(&dims, &dims, 1, |p| ext.multiplication(&gen, 1, p as usize, false));
        acc = acc.add(&wedge.compose(m.l(k)));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su2() -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::builtin("su2").unwrap())
    }

    #[test]
    fn chevalley_eilenberg_golden() {
        let g = su2();
        let m = exterior_model(&g);
        let ext = ExteriorBasis::new(3);
        let di = m.d().apply(1, &ext.vector(LambdaMonomial::generator(0), q(1)));
        let jk = LambdaMonomial::from_indices(&[1, 2]).unwrap().0;
        assert_eq!(di, ext.vector(jk, q(2)));
        assert_eq!(m.space().format(2, &di), "2·j*∧k*");
    }

    #[test]
    fn exterior_validates() {
        for name in ["su2", "sl2", "abelian:2"] {
            let g = Arc::new(LieAlgebra::builtin(name).unwrap());
            let r = exterior_model(&g).validate();
            assert!(r.pass, "{name}: {:?}", r.failures());
        }
    }

    #[test]
    fn lie_derivative_on_generators_is_coadjoint() {
        let g = Arc::new(LieAlgebra::builtin("sl2").unwrap());
        let m = exterior_model(&g);
        for k in 0..3 {
            assert_eq!(m.l(k).block(1), g.coad(k));
        }
    }

    #[test]
    fn corrupted_contraction_is_caught() {
        let g = su2();
        let m = exterior_model(&g);
        let dims = m.dims().clone();
        let bad = LinMap::from_blocks(&dims, &dims, -1, |p| {
            let b = m.i(0).block(p);
            if p == 2 {
                let mut rows = b.row_vecs().to_vec();
                rows[0] = rows[0].axpy(&q(1), &SparseVec::unit(b.cols(), 2));
                Matrix::from_rows(b.cols(), rows)
            } else {
                b
            }
        });
        let r = m.with_contraction(0, bad).unwrap().validate();
        assert!(!r.pass);
        assert!(r.failures().iter().all(|f| f.witness.is_some()));
    }

    #[test]
    fn two_d_identity() {
        let g = su2();
        let m = exterior_model(&g);
        let ext = ExteriorBasis::new(3);
        let lhs = wedge_lie_sum(&m, &ext).scale(&pairing());
        assert_eq!(lhs, m.d().scale(&q(2)));
    }

    #[test]
    fn tensor_with_trivial_is_identity() {
        let g = su2();
        let m = exterior_model(&g);
        let t = tensor_module(&m, &trivial_module(&g), None).unwrap();
        assert_eq!(t.d(), m.d());
        for k in 0..3 {
            assert_eq!(t.i(k), m.i(k));
        }
    }

    #[test]
    fn invariant_quadratic_of_su2() {
        let g = su2();
        let (rep, labels) = sym_power_rep(&g, 2);
        let v = invariant_rep_module(&g, &rep, &labels, 4).unwrap();
        assert_eq!(v.dims().dim(4), 1);
        assert_eq!(v.space().label(4, 0), "i*^2 + j*^2 + k*^2");
        let c = invariant_rep_module(&g, &g.coad_matrices(), &g.dual_labels(), 1).unwrap();
        assert_eq!(c.dims().total(), 0);
    }

    #[test]
    fn forms_slice_contraction() {
        let g = su2();
        let m = polynomial_forms_module(&g, &g.coad_matrices(), 1).unwrap();
        assert_eq!(m.dims().as_vec(), vec![3, 3]);
        // i_i(dx) is the action of i on x
        let img = m.i(0).apply(1, &SparseVec::unit(3, 0));
        let expect = g.coad(0).column(0);
        assert_eq!(img, expect);
        assert!(m.validate().pass);
    }

    #[test]
    fn module_file_round_trip() {
        let g = su2();
        let m = exterior_model(&g);
        let file = m.to_file();
        let text = serde_json::to_string(&file).unwrap();
        let back = ModuleFile::from_json(&text).unwrap().load(&g).unwrap();
        assert_eq!(back.d(), m.d());
        assert_eq!(back.i_ops(), m.i_ops());
    }
}
