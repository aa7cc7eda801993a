//! Cochain complexes over a degree window: cohomology, chain-map checks and
//! degree-bounded quasi-isomorphism checks.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{Dims, GradedSpace, LinMap};
use crate::linalg::{complement_basis, image_rank, solve_affine, Matrix, SparseVec, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("d∘d is nonzero out of degree {degree}")]
    NotAComplex { degree: i32 },
    #[error("window too small: degree {needed} requested, differential exact only through {exact}")]
    WindowTooSmall { needed: i32, exact: i32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// A complex whose differential is known to be correct out of every degree
/// `<= exact_through` (`None`: out of every degree, i.e. nothing was cut).
#[derive(Clone, Debug)]
pub struct Complex {
    space: GradedSpace,
    d: LinMap,
    exact_through: Option<i32>,
}

impl Complex {
    pub fn new(space: GradedSpace, d: LinMap, exact_through: Option<i32>) -> Result<Self, ComplexError> {
        if d.src() != space.dims() || d.tgt() != space.dims() || d.shift() != 1 {
            return Err(ComplexError::Shape("differential does not match the space".into()));
        }
        let c = Self { space, d, exact_through };
        if let Some(degree) = c.first_dd_failure() {
            return Err(ComplexError::NotAComplex { degree });
        }
        Ok(c)
    }

    /// Constructs without the `d² = 0` check, for callers that verify it
    /// themselves and want a report instead of an error.
    pub fn new_unchecked(space: GradedSpace, d: LinMap, exact_through: Option<i32>) -> Self {
        Self { space, d, exact_through }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dims(&self) -> &Dims {
        self.space.dims()
    }

    pub fn d(&self) -> &LinMap {
        &self.d
    }

    pub fn lo(&self) -> i32 {
        self.space.lo()
    }

    pub fn hi(&self) -> i32 {
        self.space.hi()
    }

    pub fn exact_through(&self) -> Option<i32> {
        self.exact_through
    }

    /// Whether `d` out of degree `q` is correct.
    pub fn is_exact_at(&self, q: i32) -> bool {
        self.exact_through.is_none_or(|e| q <= e)
    }

    pub fn first_dd_failure(&self) -> Option<i32> {
        self.dims().degrees().find(|&q| {
            let a = self.d.block(q);
            let b = self.d.block(q + 1);
            b.cols() == a.rows() && !(&b * &a).is_zero()
        })
    }

    /// Cohomology representatives in degree `m`: a basis of a complement of
    /// the coboundaries inside the cocycles.
    pub fn cohomology_at(&self, m: i32) -> CohomologyDegree {
        let z = Subspace::kernel(&self.d.block(m));
        let (_, b) = image_rank(&self.d.block(m - 1));
        let reps = complement_basis(&b, z.basis()).expect("coboundaries lie in the cocycles");
        CohomologyDegree { degree: m, cocycles: z, boundaries: b, reps }
    }

    /// Cohomology in degrees `lo..=n`, with degrees `<= n - 1` certified.
    pub fn cohomology(&self, n: i32) -> Result<CohomologyReport, ComplexError> {
        self.require_exact(n - 1)?;
        let degs: Vec<i32> = (self.lo()..=n).collect();
        let per: Vec<CohomologyDegree> = degs.par_iter().map(|&m| self.cohomology_at(m)).collect();
        let mut betti = BTreeMap::new();
        let mut representatives = BTreeMap::new();
        let mut uncertified = BTreeMap::new();
        for h in per {
            let reps: Vec<String> = h.reps.iter().map(|v| self.space.format(h.degree, v)).collect();
            if h.degree < n {
                betti.insert(h.degree, h.reps.len());
                representatives.insert(h.degree, reps);
            } else {
                uncertified.insert(h.degree, h.reps.len());
            }
        }
        Ok(CohomologyReport { certified_through: n - 1, betti, representatives, uncertified })
    }

    pub fn require_exact(&self, q: i32) -> Result<(), ComplexError> {
        match self.exact_through {
            Some(e) if e < q => Err(ComplexError::WindowTooSmall { needed: q, exact: e }),
            _ => Ok(()),
        }
    }

    /// Subcomplex spanned per degree by the given subspaces of the chain
    /// groups. Fails with the degree where `d` leaves the subspaces.
    pub fn subcomplex(
        &self,
        subspaces: &[Subspace],
        labels: Vec<Vec<String>>,
        exact_through: Option<i32>,
    ) -> Result<Complex, i32> {
        let lo = self.lo();
        let dims = Dims::new(lo, subspaces.iter().map(Subspace::dim).collect());
        let sub = |q: i32| -> Option<&Subspace> {
            if q < dims.lo() || q > dims.hi() {
                None
            } else {
                Some(&subspaces[(q - lo) as usize])
            }
        };
        let mut blocks = Vec::new();
        for q in dims.degrees() {
            let src = sub(q).unwrap();
            let block = match sub(q + 1) {
                Some(tgt) => src.restrict(&self.d.block(q), tgt).map_err(|_| q)?,
                None => Matrix::zeros(0, src.dim()),
            };
            blocks.push(block);
        }
        let d = LinMap::from_blocks(&dims, &dims, 1, |q| blocks[(q - lo) as usize].clone());
        Ok(Complex::new_unchecked(GradedSpace::new(lo, labels), d, exact_through))
    }
}

/// Cocycles, coboundaries and chosen representatives in one degree.
#[derive(Clone, Debug)]
pub struct CohomologyDegree {
    pub degree: i32,
    pub cocycles: Subspace,
    pub boundaries: Vec<SparseVec>,
    pub reps: Vec<SparseVec>,
}

impl CohomologyDegree {
    pub fn betti(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of the cocycle `z` in the representative
    /// basis, or `None` if `z` is not a cocycle.
    pub fn class_of(&self, z: &SparseVec) -> Option<SparseVec> {
        if !self.cocycles.contains(z) {
            return None;
        }
        let mut cols = self.reps.clone();
        cols.extend(self.boundaries.iter().cloned());
        let a = Matrix::from_columns(z.dim(), &cols);
        let x = solve_affine(&a, z).ok()??;
        Some(x.select(&(0..self.reps.len()).collect::<Vec<_>>()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub certified_through: i32,
    pub betti: BTreeMap<i32, usize>,
    pub representatives: BTreeMap<i32, Vec<String>>,
    /// Top degree of the window, where the outgoing differential may be cut.
    pub uncertified: BTreeMap<i32, usize>,
}

impl CohomologyReport {
    pub fn betti_vec(&self) -> Vec<usize> {
        self.betti.values().copied().collect()
    }
}

/// First failure of a chain-map or operator identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub degree: i32,
    pub basis_index: usize,
    pub basis_label: String,
    pub defect: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub pass: bool,
    pub witness: Option<Witness>,
}

fn check_shapes(f: &LinMap, c: &Complex, dd: &Complex) -> Result<(), ComplexError> {
    if f.src() != c.dims() || f.tgt() != dd.dims() {
        return Err(ComplexError::Shape("map does not match source/target complexes".into()));
    }
    Ok(())
}

/// Verifies `d_D ∘ f = f ∘ d_C` in every degree where both differentials
/// are exact.
pub fn check_chain_map(f: &LinMap, c: &Complex, dd: &Complex) -> Result<ChainCheck, ComplexError> {
    check_shapes(f, c, dd)?;
    let lhs = dd.d().compose(f);
    let rhs = f.compose(c.d());
    let defect = lhs.sub(&rhs);
    let keep = |q: i32| c.is_exact_at(q) && dd.is_exact_at(q + f.shift());
    Ok(match defect.first_nonzero_where(keep) {
        None => ChainCheck { pass: true, witness: None },
        Some((q, j, col)) => ChainCheck {
            pass: false,
            witness: Some(Witness {
                degree: q,
                basis_index: j,
                basis_label: c.space().label(q, j).to_string(),
                defect: dd.space().format(q + f.shift() + 1, &col),
            }),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedDegree {
    pub degree: i32,
    pub source_betti: usize,
    pub target_betti: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoReport {
    pub chain_map: ChainCheck,
    pub degrees: Vec<InducedDegree>,
    pub first_failure: Option<i32>,
    pub pass: bool,
}

/// Matrix of the map induced by `f` from `H^m(C)` to `H^m(D)` in the chosen
/// representative bases.
pub fn induced_map(f: &LinMap, hc: &CohomologyDegree, hd: &CohomologyDegree) -> Matrix {
    let m = hc.degree;
    let cols: Vec<SparseVec> = hc
        .reps
        .iter()
        .map(|r| {
            let img = f.apply(m, r);
            hd.class_of(&img).expect("chain maps send cocycles to cocycles")
        })
        .collect();
    Matrix::from_columns(hd.betti(), &cols)
}

/// Checks that `f` is a chain map inducing isomorphisms on `H^m` for all
/// `m <= n - 1`.
pub fn quasi_iso_check(f: &LinMap, c: &Complex, dd: &Complex, n: i32) -> Result<QuasiIsoReport, ComplexError> {
    let chain_map = check_chain_map(f, c, dd)?;
    if !chain_map.pass {
        return Ok(QuasiIsoReport { chain_map, degrees: Vec::new(), first_failure: None, pass: false });
    }
    c.require_exact(n - 1)?;
    dd.require_exact(n - 1)?;
    let lo = c.lo().min(dd.lo());
    let degrees: Vec<InducedDegree> = (lo..n)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&m| {
            let hc = c.cohomology_at(m);
            let hd = dd.cohomology_at(m);
            let ind = induced_map(f, &hc, &hd);
            InducedDegree {
                degree: m,
                source_betti: hc.betti(),
                target_betti: hd.betti(),
                rank: crate::linalg::rank(&ind),
            }
        })
        .collect();
    let first_failure = degrees
        .iter()
        .find(|x| x.source_betti != x.target_betti || x.rank != x.source_betti)
        .map(|x| x.degree);
    Ok(QuasiIsoReport { chain_map, pass: first_failure.is_none(), degrees, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn labels(dims: &[usize]) -> Vec<Vec<String>> {
        dims.iter().enumerate().map(|(d, &n)| (0..n).map(|i| format!("e{d}_{i}")).collect()).collect()
    }

    fn line_complex(d01: i64) -> Complex {
        let dims = Dims::new(0, vec![1, 1]);
        let d = LinMap::from_blocks(&dims, &dims, 1, |q| match q {
            0 => Matrix::from_ints(&[&[d01]]),
            _ => Matrix::zeros(0, 1),
        });
        Complex::new(GradedSpace::new(0, labels(&[1, 1])), d, None).unwrap()
    }

    #[test]
    fn identity_differential_is_acyclic() {
        let c = line_complex(1);
        let h = c.cohomology(2).unwrap();
        assert!(h.betti.values().all(|&b| b == 0));
        let c = line_complex(0);
        assert_eq!(c.cohomology(2).unwrap().betti_vec(), vec![1, 1]);
    }

    #[test]
    fn identity_and_zero_are_chain_maps() {
        let c = line_complex(1);
        let id = LinMap::identity(c.dims());
        assert!(check_chain_map(&id, &c, &c).unwrap().pass);
        let z = LinMap::zero(c.dims(), c.dims(), 0);
        assert!(check_chain_map(&z, &c, &c).unwrap().pass);
        assert!(quasi_iso_check(&id, &c, &c, 2).unwrap().pass);
    }

    #[test]
    fn map_to_zero_fails_in_degree_zero() {
        let src = line_complex(0);
        let zero_dims = Dims::new(0, vec![0, 0]);
        let tgt = Complex::new(
            GradedSpace::new(0, vec![vec![], vec![]]),
            LinMap::zero(&zero_dims, &zero_dims, 1),
            None,
        )
        .unwrap();
        let f = LinMap::zero(src.dims(), tgt.dims(), 0);
        let r = quasi_iso_check(&f, &src, &tgt, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_failure, Some(0));
    }

    #[test]
    fn rejects_nonzero_square() {
        let dims = Dims::new(0, vec![1, 1, 1]);
        let d = LinMap::from_blocks(&dims, &dims, 1, |q| match q {
            2 => Matrix::zeros(0, 1),
            _ => Matrix::from_ints(&[&[1]]),
        });
        assert!(matches!(
            Complex::new(GradedSpace::new(0, labels(&[1, 1, 1])), d, None),
            Err(ComplexError::NotAComplex { degree: 0 })
        ));
    }

    #[test]
    fn window_too_small() {
        let c = Complex::new_unchecked(
            GradedSpace::new(0, labels(&[1, 1])),
            LinMap::zero(&Dims::new(0, vec![1, 1]), &Dims::new(0, vec![1, 1]), 1),
            Some(0),
        );
        assert!(c.cohomology(1).is_ok());
        assert!(matches!(c.cohomology(3), Err(ComplexError::WindowTooSmall { .. })));
    }
}
