//! Dense symmetric linear algebra: spectral decomposition (cyclic Jacobi),
//! PSD projection, and Cholesky/SPD solves.
//!
//! Everything here operates on immutable inputs and returns fresh values, so
//! all functions are safe to call concurrently. Matrices are dense and
//! row-major; the module targets the desk scale (orders up to a few hundred)
//! that the rest of the crate needs.

mod cholesky;
mod eigen;
mod matrix;
mod sym;

pub use cholesky::{cholesky, solve_spd, CholeskyFactor};
pub use eigen::{psd_part, sym_eigen, SpectralDecomposition};
pub(crate) use matrix::dot;
pub use matrix::Matrix;
pub use sym::SymMatrix;
