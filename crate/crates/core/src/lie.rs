//! Lie algebras given by structure constants: loading, validation,
//! reductivity certification, adjoint and coadjoint matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    format_rational, image_rank, kernel_basis, parse_rational, q, rank, Matrix, Rational, SparseVec,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("malformed algebra description: {0}")]
    Parse(String),
    #[error("index {index} out of range for dimension {dim}")]
    BadIndex { index: usize, dim: usize },
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("antisymmetry violated by [{i},{j}]")]
    AntisymmetryViolation { i: usize, j: usize },
    #[error("Jacobi identity violated on basis triple ({i},{j},{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("NotReductive: {0}")]
    NotReductive(String),
    #[error("unknown built-in algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("representation is not bracket compatible at ({i},{j})")]
    NotARepresentation { i: usize, j: usize },
}

/// On-disk form of a Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<BracketTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketTerm {
    pub k: usize,
    pub c: String,
}

/// `[λ_i, λ_j] = Σ_k c^k_{ij} λ_k`, with `brackets[i][j]` the coordinate
/// vector of the bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    brackets: Vec<Vec<SparseVec>>,
}

/// Center and derived subalgebra of a certified reductive algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub center: Vec<SparseVec>,
    pub derived: Vec<SparseVec>,
    pub killing: Matrix,
}

const SU2: &str = include_str!("../data/su2.json");
const SL2: &str = include_str!("../data/sl2.json");
const SU2XSU2: &str = include_str!("../data/su2xsu2.json");

impl LieAlgebra {
    /// Loads from a description, completing antisymmetry from `i < j`
    /// entries and checking the Jacobi identity.
    pub fn from_file(desc: &AlgebraFile) -> Result<Self, LieError> {
        let n = desc.dim;
        if desc.basis.len() != n {
            return Err(LieError::Parse(format!(
                "{} basis labels for dimension {n}",
                desc.basis.len()
            )));
        }
        if n >= 64 {
            return Err(LieError::Parse(format!("dimension {n} too large (max 63)")));
        }
        let mut given: Vec<Vec<Option<SparseVec>>> = vec![vec![None; n]; n];
        for e in &desc.brackets {
            for idx in [e.i, e.j] {
                if idx >= n {
                    return Err(LieError::BadIndex { index: idx, dim: n });
                }
            }
            let mut raw = Vec::new();
            for t in &e.terms {
                if t.k >= n {
                    return Err(LieError::BadIndex { index: t.k, dim: n });
                }
                let c = parse_rational(&t.c).ok_or_else(|| LieError::BadRational(t.c.clone()))?;
                raw.push((t.k, c));
            }
            let v = SparseVec::from_entries(n, raw);
            if e.i == e.j && !v.is_zero() {
                return Err(LieError::AntisymmetryViolation { i: e.i, j: e.j });
            }
            let slot = &mut given[e.i][e.j];
            match slot {
                Some(prev) if *prev != v => {
                    return Err(LieError::Parse(format!("conflicting entries for [{},{}]", e.i, e.j)))
                }
                _ => *slot = Some(v),
            }
        }
        let mut brackets = vec![vec![SparseVec::zero(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = match (&given[i][j], &given[j][i]) {
                    (Some(a), Some(b)) => {
                        if &-b != a {
                            return Err(LieError::AntisymmetryViolation { i, j });
                        }
                        a.clone()
                    }
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => -b,
                    (None, None) => SparseVec::zero(n),
                };
                brackets[i][j] = v;
            }
        }
        let g = Self { name: desc.name.clone(), labels: desc.basis.clone(), brackets };
        g.check_jacobi()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, LieError> {
        let desc: AlgebraFile = serde_json::from_str(text).map_err(|e| {
            LieError::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
        })?;
        Self::from_file(&desc)
    }

    /// `su2`, `sl2`, `su2xsu2` or `abelian:n`.
    pub fn builtin(name: &str) -> Result<Self, LieError> {
        match name {
            "su2" => Self::from_json(SU2),
            "sl2" => Self::from_json(SL2),
            "su2xsu2" => Self::from_json(SU2XSU2),
            _ => {
                let n = name
                    .strip_prefix("abelian:")
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| LieError::UnknownBuiltin(name.to_string()))?;
                Ok(Self::abelian(n))
            }
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["su2", "sl2", "su2xsu2", "abelian:n"]
    }

    pub fn abelian(n: usize) -> Self {
        let labels = if n == 1 { vec!["t".to_string()] } else { (1..=n).map(|k| format!("t{k}")).collect() };
        Self {
            name: format!("abelian:{n}"),
            labels,
            brackets: vec![vec![SparseVec::zero(n); n]; n],
        }
    }

    pub fn to_file(&self) -> AlgebraFile {
        let n = self.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = &self.brackets[i][j];
                if !v.is_zero() {
                    brackets.push(BracketEntry {
                        i,
                        j,
                        terms: v
                            .entries()
                            .iter()
                            .map(|(k, c)| BracketTerm { k: *k, c: format_rational(c) })
                            .collect(),
                    });
                }
            }
        }
        AlgebraFile { name: self.name.clone(), dim: n, basis: self.labels.clone(), brackets }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Labels of the dual basis `λ^k`.
    pub fn dual_labels(&self) -> Vec<String> {
        self.labels.iter().map(|l| format!("{l}*")).collect()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.brackets[i][j]
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.brackets[i][j].get(k)
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.iter().flatten().all(SparseVec::is_zero)
    }

    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::zero(self.dim());
        for (i, a) in x.entries() {
            for (j, b) in y.entries() {
                acc = acc.axpy(&(a * b), &self.brackets[*i][*j]);
            }
        }
        acc
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let e = |a: usize| SparseVec::unit(n, a);
                    let t1 = self.bracket(&e(i), &self.brackets[j][k]);
                    let t2 = self.bracket(&e(j), &self.brackets[k][i]);
                    let t3 = self.bracket(&e(k), &self.brackets[i][j]);
                    if !(&(&t1 + &t2) + &t3).is_zero() {
                        return Err(LieError::JacobiViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// `ad_k`, column `j` holding `[λ_k, λ_j]`.
    pub fn ad(&self, k: usize) -> Matrix {
        Matrix::from_columns(self.dim(), &self.brackets[k])
    }

    pub fn ad_matrices(&self) -> Vec<Matrix> {
        (0..self.dim()).map(|k| self.ad(k)).collect()
    }

    /// Coadjoint action on `g*` in the dual basis: `coad_k = -ad_kᵀ`. This is
    /// the Lie derivative `L_k = d_Λ i_k + i_k d_Λ` on `Λ¹g*`.
    pub fn coad(&self, k: usize) -> Matrix {
        self.ad(k).transpose().scale(&q(-1))
    }

    pub fn coad_matrices(&self) -> Vec<Matrix> {
        (0..self.dim()).map(|k| self.coad(k)).collect()
    }

    /// Killing form `K(x, y) = tr(ad_x ad_y)` on the basis.
    pub fn killing(&self) -> Matrix {
        let ads = self.ad_matrices();
        let n = self.dim();
        let rows = (0..n)
            .map(|a| {
                let raw = (0..n)
                    .map(|b| {
                        let prod = &ads[a] * &ads[b];
                        (b, (0..n).map(|t| prod.get(t, t)).sum())
                    })
                    .collect();
                SparseVec::from_entries(n, raw)
            })
            .collect();
        Matrix::from_rows(n, rows)
    }

    /// Splits `g = z ⊕ [g,g]` and checks the Killing form is nondegenerate on
    /// the derived part.
    pub fn certify_reductive(&self) -> Result<Decomposition, LieError> {
        let n = self.dim();
        let ads = self.ad_matrices();
        let stacked = Matrix::vstack(&ads.iter().collect::<Vec<_>>(), n);
        let center = kernel_basis(&stacked);
        let all_cols = Matrix::from_columns(
            n,
            &self.brackets.iter().flatten().cloned().collect::<Vec<_>>(),
        );
        let (_, derived) = image_rank(&all_cols);
        if center.len() + derived.len() != n {
            return Err(LieError::NotReductive(format!(
                "dim center {} + dim [g,g] {} != dim g {n}",
                center.len(),
                derived.len()
            )));
        }
        let mut both = center.clone();
        both.extend(derived.iter().cloned());
        if rank(&Matrix::from_columns(n, &both)) != n {
            return Err(LieError::NotReductive("center meets [g,g]".into()));
        }
        let killing = self.killing();
        let b = Matrix::from_columns(n, &derived);
        let restricted = &(&b.transpose() * &killing) * &b;
        if rank(&restricted) != derived.len() {
            return Err(LieError::NotReductive(
                "Killing form degenerate on [g,g]".into(),
            ));
        }
        Ok(Decomposition { center, derived, killing })
    }

    /// Checks `ρ([λ_i, λ_j]) = [ρ_i, ρ_j]`.
    pub fn check_representation(&self, rep: &[Matrix]) -> Result<(), LieError> {
        let n = self.dim();
        if rep.len() != n {
            return Err(LieError::Parse(format!("{} action matrices for dimension {n}", rep.len())));
        }
        let dim = rep.first().map_or(0, Matrix::rows);
        for m in rep {
            if m.rows() != dim || m.cols() != dim {
                return Err(LieError::Parse("action matrices must be square of equal size".into()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let comm = &(&rep[i] * &rep[j]) - &(&rep[j] * &rep[i]);
                let mut img = Matrix::zeros(dim, dim);
                for (k, c) in self.brackets[i][j].entries() {
                    img = img.axpy(c, &rep[*k]);
                }
                if comm != img {
                    return Err(LieError::NotARepresentation { i, j });
                }
            }
        }
        Ok(())
    }

    /// Direct sum `g ⊕ h`.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (a, b) = (self.dim(), other.dim());
        let n = a + b;
        let mut brackets = vec![vec![SparseVec::zero(n); n]; n];
        for i in 0..a {
            for j in 0..a {
                brackets[i][j] = self.brackets[i][j].shifted(0, n);
            }
        }
        for i in 0..b {
            for j in 0..b {
                brackets[a + i][a + j] = other.brackets[i][j].shifted(a, n);
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        LieAlgebra { name: format!("{}+{}", self.name, other.name), labels, brackets }
    }
}

/// Simultaneous kernel of the action matrices: the invariant vectors.
pub fn invariant_vectors(rep: &[Matrix]) -> Vec<SparseVec> {
    let Some(first) = rep.first() else {
        return Vec::new();
    };
    let stacked = Matrix::vstack(&rep.iter().collect::<Vec<_>>(), first.cols());
    kernel_basis(&stacked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    #[test]
    fn builtins_load() {
        for name in ["su2", "sl2", "su2xsu2", "abelian:1", "abelian:2"] {
            let g = LieAlgebra::builtin(name).unwrap();
            g.certify_reductive().unwrap();
        }
    }

    #[test]
    fn su2_killing_is_minus_eight() {
        let g = LieAlgebra::builtin("su2").unwrap();
        let d = g.certify_reductive().unwrap();
        assert!(d.center.is_empty());
        assert_eq!(d.derived.len(), 3);
        assert_eq!(d.killing, Matrix::scalar(3, &q(-8)));
    }

    #[test]
    fn abelian_is_all_center() {
        let d = LieAlgebra::builtin("abelian:2").unwrap().certify_reductive().unwrap();
        assert_eq!(d.center.len(), 2);
        assert!(d.derived.is_empty());
    }

    #[test]
    fn affine_line_algebra_not_reductive() {
        let text = r#"{"name":"aff","dim":2,"basis":["x","y"],
            "brackets":[{"i":0,"j":1,"terms":[{"k":1,"c":"1"}]}]}"#;
        let g = LieAlgebra::from_json(text).unwrap();
        assert!(matches!(g.certify_reductive(), Err(LieError::NotReductive(_))));
    }

    #[test]
    fn adjoint_read_off() {
        let g = LieAlgebra::builtin("su2").unwrap();
        let ad_i = g.ad(0);
        assert_eq!(ad_i.column(0), SparseVec::zero(3));
        assert_eq!(ad_i.column(1), SparseVec::from_ints(&[0, 0, 2]));
        assert_eq!(ad_i.column(2), SparseVec::from_ints(&[0, -2, 0]));
        let s = LieAlgebra::builtin("sl2").unwrap();
        let ad_h = s.ad(0);
        assert_eq!(ad_h.column(1), SparseVec::from_ints(&[0, 2, 0]));
        assert_eq!(ad_h.column(2), SparseVec::from_ints(&[0, 0, -2]));
        assert!(ad_h.column(0).is_zero());
    }

    #[test]
    fn jacobi_violation_reported() {
        let text = r#"{"name":"bad","dim":3,"basis":["x","y","z"],
            "brackets":[{"i":0,"j":1,"terms":[{"k":0,"c":"1"}]},
                        {"i":1,"j":2,"terms":[{"k":2,"c":"1"}]},
                        {"i":0,"j":2,"terms":[{"k":0,"c":"1"}]}]}"#;
        assert!(matches!(
            LieAlgebra::from_json(text),
            Err(LieError::JacobiViolation { .. })
        ));
    }

    #[test]
    fn antisymmetry_checked() {
        let text = r#"{"name":"bad","dim":2,"basis":["x","y"],
            "brackets":[{"i":0,"j":1,"terms":[{"k":1,"c":"1"}]},
                        {"i":1,"j":0,"terms":[{"k":1,"c":"1"}]}]}"#;
        assert!(matches!(
            LieAlgebra::from_json(text),
            Err(LieError::AntisymmetryViolation { .. })
        ));
        let text = r#"{"name":"bad","dim":2,"basis":["x","y"],
            "brackets":[{"i":0,"j":3,"terms":[]}]}"#;
        assert!(matches!(LieAlgebra::from_json(text), Err(LieError::BadIndex { .. })));
    }

    #[test]
    fn coadjoint_has_no_invariants_for_su2() {
        let g = LieAlgebra::builtin("su2").unwrap();
        assert!(invariant_vectors(&g.coad_matrices()).is_empty());
        g.check_representation(&g.coad_matrices()).unwrap();
        g.check_representation(&g.ad_matrices()).unwrap();
    }

    #[test]
    fn round_trip_file() {
        let g = LieAlgebra::builtin("sl2").unwrap();
        let again = LieAlgebra::from_file(&g.to_file()).unwrap();
        assert_eq!(g, again);
        let t = LieAlgebra::from_json(
            r#"{"name":"q","dim":2,"basis":["a","b"],"brackets":[]}"#,
        )
        .unwrap();
        assert!(t.is_abelian());
        assert_eq!(qf(1, 2), parse_rational(" 1/2 ").unwrap());
    }
}
