//! Exact rational toolkit for differential graded g-modules with
//! contractions, the Weil algebra, invariant and equivariant cohomology, and
//! explicit Koszul duality quasi-isomorphisms.

pub mod complex;
pub mod graded;
pub mod lie;
pub mod linalg;
pub mod monomial;
pub mod signs;
pub mod kg;
pub mod equivariant;
pub mod weil;
pub mod transgression;
pub mod duality;
pub mod cli;
