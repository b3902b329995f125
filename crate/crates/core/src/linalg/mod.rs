//! Exact integer linear algebra: Hermite and Smith forms, kernels, cokernels.

pub mod abelian;
pub mod cokernel;
pub mod hnf;
pub mod matrix;
pub mod smith;

pub use abelian::{AbelianHom, AbelianSubgroup, FiniteAbelianGroup};
pub use cokernel::{cokernel, Cokernel};
pub use hnf::{column_hnf, column_lattice_basis, column_span_contains, hnf, kernel_basis, rank, solve_integer, ColumnHnf};
pub use matrix::{is_zero_vec, vec_from_i64, IntMatrix, SparseMatrix};
pub use smith::{snf, SmithDecomposition};
