use std::sync::Arc;

use koszul_core::complex::{check_chain_map, quasi_iso_check, Complex};
use koszul_core::duality::h_of;
use koszul_core::equivariant::cartan_model;
use koszul_core::graded::{GradedSpace, LinMap};
use koszul_core::kg::{
    exterior_model, invariant_rep_module, polynomial_forms_module, sym_power_rep, tensor_module, trivial_module,
    validate_kg, KgModule,
};
use koszul_core::lie::{AlgebraFile, BracketEntry, BracketTerm, LieAlgebra};
use koszul_core::linalg::{format_rational, q, rank, solve_affine, Matrix, SparseVec};
use koszul_core::monomial::LambdaMonomial;
use koszul_core::weil::twist_operators;
use proptest::prelude::*;

/// Rewrites `g` in the basis given by the columns of `p`.
fn change_basis(g: &LieAlgebra, p: &Matrix) -> LieAlgebra {
    let n = g.dim();
    let cols = p.columns();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = g.bracket(&cols[i], &cols[j]);
            let x = solve_affine(p, &v).unwrap().expect("p is invertible");
            let terms: Vec<BracketTerm> =
                x.entries().iter().map(|(k, c)| BracketTerm { k: *k, c: format_rational(c) }).collect();
            if !terms.is_empty() {
                brackets.push(BracketEntry { i, j, terms });
            }
        }
    }
    let basis = (0..n).map(|k| format!("y{k}")).collect();
    LieAlgebra::from_file(&AlgebraFile { name: format!("{}'", g.name()), dim: n, basis, brackets }).unwrap()
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2i64..=2, n * n)
        .prop_map(move |e| {
            let rows: Vec<&[i64]> = e.chunks(n).collect();
            Matrix::from_ints(&rows)
        })
        .prop_filter("singular", move |m| rank(m) == n)
}

fn algebra() -> impl Strategy<Value = Arc<LieAlgebra>> {
    (prop::sample::select(vec!["su2", "sl2", "abelian:3"]), invertible(3))
        .prop_map(|(name, p)| Arc::new(change_basis(&LieAlgebra::builtin(name).unwrap(), &p)))
}

fn small_algebra() -> impl Strategy<Value = Arc<LieAlgebra>> {
    prop_oneof![
        algebra(),
        Just(Arc::new(LieAlgebra::builtin("abelian:1").unwrap())),
        Just(Arc::new(LieAlgebra::builtin("abelian:2").unwrap())),
    ]
}

/// Permutation sorting `keys`, padded or truncated to `n`.
fn argsort(keys: &[u32], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| (keys.get(i).copied().unwrap_or(0), i));
    idx
}

fn permutation_matrix(perm: &[usize], signs: &[bool]) -> Matrix {
    let n = perm.len();
    let cols: Vec<SparseVec> = (0..n)
        .map(|i| {
            let s = if signs.get(i).copied().unwrap_or(false) { -1 } else { 1 };
            SparseVec::unit(n, perm[i]).scale(&q(s))
        })
        .collect();
    Matrix::from_columns(n, &cols)
}

/// `c` conjugated by a signed permutation in every degree.
fn permuted(c: &Complex, keys: &[u32], signs: &[bool]) -> (Complex, LinMap) {
    let dims = c.dims().clone();
    let mats: Vec<Matrix> =
        dims.degrees().map(|d| permutation_matrix(&argsort(keys, dims.dim(d)), signs)).collect();
    let lo = dims.lo();
    let at = |d: i32| &mats[(d - lo) as usize];
    let fwd = LinMap::from_blocks(&dims, &dims, 0, |d| at(d).clone());
    let d = LinMap::from_blocks(&dims, &dims, 1, |q| {
        let block = c.d().block(q);
        if q + 1 > dims.hi() {
            return block;
        }
        // signed permutations are inverted by transposition
        at(q + 1).matmul(&block).matmul(&at(q).transpose())
    });
    let labels = dims.degrees().map(|q| c.space().labels(q).to_vec()).collect();
    let out = Complex::new(GradedSpace::new(lo, labels), d, c.exact_through()).unwrap();
    (out, fwd)
}

fn module_for(g: &Arc<LieAlgebra>, which: usize) -> KgModule {
    match which % 5 {
        0 => trivial_module(g),
        1 => exterior_model(g),
        2 => polynomial_forms_module(g, &g.coad_matrices(), 1).unwrap(),
        3 => {
            let (rep, labels) = sym_power_rep(g, 2);
            invariant_rep_module(g, &rep, &labels, 4).unwrap()
        }
        _ => tensor_module(&exterior_model(g), &trivial_module(g), None).unwrap(),
    }
}

fn monomial(n: usize) -> impl Strategy<Value = LambdaMonomial> {
    prop::collection::btree_set(0..n, 0..=n.min(3))
        .prop_map(|s| LambdaMonomial::from_indices(&s.into_iter().collect::<Vec<_>>()).unwrap().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn betti_numbers_ignore_basis_order(
        g in small_algebra(),
        keys in prop::collection::vec(any::<u32>(), 8),
        signs in prop::collection::vec(any::<bool>(), 8),
    ) {
        let c = exterior_model(&g).complex().clone();
        let n = c.hi() + 1;
        let (p, fwd) = permuted(&c, &keys, &signs);
        prop_assert_eq!(c.cohomology(n).unwrap().betti_vec(), p.cohomology(n).unwrap().betti_vec());
        prop_assert!(quasi_iso_check(&fwd, &c, &p, n).unwrap().pass);
    }

    #[test]
    fn identity_is_a_quasi_isomorphism(g in small_algebra(), which in 0usize..5) {
        let m = module_for(&g, which);
        let c = m.complex();
        let n = c.exact_through().map_or(c.hi() + 1, |e| e + 1);
        let r = quasi_iso_check(&LinMap::identity(c.dims()), c, c, n).unwrap();
        prop_assert!(r.pass);
        prop_assert!(r.degrees.iter().all(|x| x.rank == x.source_betti));
    }

    #[test]
    fn cohomology_is_independent_of_algebra_basis(g in algebra()) {
        let original = LieAlgebra::builtin(match g.name() {
            "su2'" => "su2",
            "sl2'" => "sl2",
            _ => "abelian:3",
        }).unwrap();
        let a = exterior_model(&g).complex().cohomology(4).unwrap().betti_vec();
        let b = exterior_model(&Arc::new(original)).complex().cohomology(4).unwrap().betti_vec();
        prop_assert_eq!(a, b);
        prop_assert!(g.certify_reductive().is_ok());
    }

    #[test]
    fn constructors_validate(g in algebra(), which in 0usize..5) {
        let m = module_for(&g, which);
        let r = validate_kg(&m);
        prop_assert!(r.pass, "{:?}", r.failures());
    }

    #[test]
    fn twist_is_invertible(g in small_algebra(), which in 0usize..5) {
        let m = module_for(&g, which);
        let t = twist_operators(&m);
        prop_assert_eq!(t.t.compose(&t.t_inv), LinMap::identity(t.lm.dims()));
        prop_assert_eq!(t.t_inv.compose(&t.t), LinMap::identity(t.lm.dims()));
        prop_assert!(t.nilpotency_power().is_zero());
    }

    #[test]
    fn contractions_supercommute(g in algebra(), which in 0usize..5, x in monomial(3), y in monomial(3)) {
        let m = module_for(&g, which);
        let ix = m.multivector_contraction(&[(x, q(1))]);
        let iy = m.multivector_contraction(&[(y, q(1))]);
        let (p, r) = (x.degree(), y.degree());
        let sign = if p * r % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(ix.compose(&iy), iy.compose(&ix).scale(&q(sign)));
        match x.wedge(y) {
            Some((xy, s)) => {
                let ixy = m.multivector_contraction(&[(xy, q(1))]);
                prop_assert_eq!(ixy.scale(&q(s)), ix.compose(&iy));
            }
            None => prop_assert!(ix.compose(&iy).is_zero()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn truncation_does_not_change_low_cohomology(g in small_algebra(), which in 0usize..2, top in 3i32..5) {
        let m = module_for(&g, which);
        let short = cartan_model(&m, top).unwrap();
        let long = cartan_model(&m, top + 2).unwrap();
        let a = short.complex().cohomology(top).unwrap().betti_vec();
        let b = long.complex().cohomology(top).unwrap().betti_vec();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn invariant_polynomials_act_by_chain_maps(g in small_algebra(), which in 0usize..3, a in 1usize..3, pick in any::<usize>()) {
        let m = module_for(&g, which);
        let cartan = cartan_model(&m, 5).unwrap();
        let s = cartan.s_upper(a);
        prop_assume!(!s.is_empty());
        let act = cartan.s_action(a, &s[pick % s.len()]);
        prop_assert!(check_chain_map(&act, cartan.complex(), cartan.complex()).unwrap().pass);
    }

    #[test]
    fn koszul_differential_squares_to_zero(g in small_algebra(), which in 0usize..2, picks in prop::collection::vec((1usize..3, any::<usize>()), 1..3)) {
        let m = module_for(&g, which);
        let cartan = cartan_model(&m, 5).unwrap();
        let actions: Vec<LinMap> = picks
            .iter()
            .filter_map(|&(a, k)| {
                let s = cartan.s_upper(a);
                (!s.is_empty()).then(|| cartan.s_action(a, &s[k % s.len()]))
            })
            .collect();
        prop_assume!(!actions.is_empty());
        // h_of rejects a differential with d² ≠ 0
        let h = h_of(cartan.complex(), &actions, 5).unwrap();
        prop_assert!(h.complex.first_dd_failure().is_none());
    }
}
