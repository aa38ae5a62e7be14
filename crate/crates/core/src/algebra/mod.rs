//! Exact integer linear algebra.

mod complex;
mod group;
mod matrix;
mod smith;

pub use complex::{ChainComplex, Coefficients};
pub use group::{coordinates, lattice_basis, subquotient, GroupHom, GroupSummary, Presented};
pub use matrix::Matrix;
pub use smith::{kernel_basis, smith_normal_form, solve, SmithDecomposition};
