//! Exact linear algebra: scalars, sparse vectors, row reduction and complexes.

pub mod complex;
pub mod field;
pub mod sparse;

pub use complex::{BettiTable, ChainMap, Cohomology, Complex, Homotopy, HomotopyInverse, LinearMap};
pub use field::{Field, Scalar};
pub use sparse::{kernel, rank, solve, Echelon, Insert, SparseMatrix, Vector};
