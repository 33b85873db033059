//! Cholesky factorization and SPD solves.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

/// Lower-triangular Cholesky factor of `A + jitter·I`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Matrix,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    /// Jitter that was added to the diagonal before factoring.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Solve `(A + jitter·I) x = b`.
    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut y = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.l[(i, j)] * y[j];
            }
            y[i] /= self.l[(i, i)];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.l[(j, i)] * y[j];
            }
            y[i] /= self.l[(i, i)];
        }
        y
    }

    /// Solve for a matrix right-hand side, column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.rows(), self.order(), "rhs rows mismatch");
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut col = vec![0.0; b.rows()];
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                col[i] = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    /// Inverse of the factored matrix as a symmetric matrix.
    pub fn inverse(&self) -> SymMatrix {
        let inv = self.solve_matrix(&Matrix::identity(self.order()));
        SymMatrix::symmetrize(&inv).expect("inverse is square")
    }

    /// `log det(A + jitter·I) = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.order()).map(|i| self.l[(i, i)].ln()).sum::<f64>() * 2.0
    }
}

/// Factor `A + jitter·I = L Lᵀ`. Fails with [`Error::NotPositiveDefinite`]
/// when a pivot is not strictly positive after the jitter.
pub fn cholesky(a: &SymMatrix, jitter: f64) -> Result<CholeskyFactor> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(
            "cholesky input has non-finite entries".into(),
        ));
    }
    if jitter < 0.0 {
        return Err(Error::InvalidInput("jitter must be non-negative".into()));
    }
    let n = a.order();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NotPositiveDefinite(format!(
                        "pivot {s:.3e} at index {i} (jitter {jitter:.1e})"
                    )));
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(CholeskyFactor { l, jitter })
}

/// Solve `A x = rhs` for SPD `A` (no jitter).
pub fn solve_spd(a: &SymMatrix, rhs: &Matrix) -> Result<Matrix> {
    if rhs.rows() != a.order() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: matrix order {} vs rhs rows {}",
            a.order(),
            rhs.rows()
        )));
    }
    Ok(cholesky(a, 0.0)?.solve_matrix(rhs))
}
