//! Cyclic Jacobi eigendecomposition and the PSD part of a symmetric matrix.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

/// Spectral decomposition `A = Oᵀ · diag(λ) · O` with an orthogonal `O` whose
/// *rows* are eigenvectors and eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl SpectralDecomposition {
    /// Rebuild `Oᵀ · diag(λ) · O`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(|l| l)
    }

    /// Rebuild with eigenvalues mapped through `f`, i.e. `Oᵀ · diag(f(λ)) · O`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.eigenvalues.len();
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| mapped[k] * self.basis[(k, i)] * self.basis[(k, j)])
                .sum()
        })
    }

    /// `‖OᵀO − I‖_max`, a cheap orthogonality diagnostic.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let dot: f64 = (0..n)
                    .map(|k| self.basis[(k, i)] * self.basis[(k, j)])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // eigenvalues are sorted descending
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecompose a symmetric matrix with the cyclic Jacobi method.
///
/// Sweeps rotate away every off-diagonal entry above a per-sweep threshold;
/// iteration stops once the off-diagonal Frobenius norm falls below
/// `1e-12 · ‖A‖_F`. Robust for any symmetric input at the matrix orders this
/// crate targets.
pub fn sym_eigen(a: &SymMatrix) -> Result<SpectralDecomposition> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(
            "eigendecomposition input has non-finite entries".into(),
        ));
    }
    let n = a.order();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }

    // Working copy w; v accumulates rotations, columns of v are eigenvectors.
    let mut w = a.to_matrix();
    let mut v = Matrix::identity(n);

    let frob: f64 = a.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-12 * frob;

    if n == 1 || frob == 0.0 {
        return Ok(finish(w, v));
    }

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&w);
        if off <= tol {
            return Ok(finish(w, v));
        }
        // Threshold sweep: skip entries already negligible this pass.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq.abs() <= threshold {
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }
                rotate(&mut w, &mut v, p, q);
            }
        }
    }

    // One final check: the loop may have converged on its last sweep.
    if off_diagonal_norm(&w) <= tol {
        return Ok(finish(w, v));
    }
    Err(Error::NoConvergence(format!(
        "Jacobi sweeps exceeded {MAX_SWEEPS} (off-diagonal norm {:.3e}, tol {:.3e})",
        off_diagonal_norm(&w),
        tol
    )))
}

fn off_diagonal_norm(w: &Matrix) -> f64 {
    let n = w.rows();
    let mut s = 0.0;
    for p in 0..n - 1 {
        for q in p + 1..n {
            s += 2.0 * w[(p, q)] * w[(p, q)];
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `w[(p, q)]`.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = w.rows();
    let apq = w[(p, q)];
    let diff = w[(q, q)] - w[(p, p)];
    let t = if apq.abs() < diff.abs() * 1e-36 {
        apq / diff
    } else {
        let theta = 0.5 * diff / apq;
        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
        if theta < 0.0 {
            t = -t;
        }
        t
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);
    let h = t * apq;

    w[(p, p)] -= h;
    w[(q, q)] += h;
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;

    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let g = w[(j, p)];
        let hh = w[(j, q)];
        let gp = g - s * (hh + g * tau);
        let gq = hh + s * (g - hh * tau);
        w[(j, p)] = gp;
        w[(p, j)] = gp;
        w[(j, q)] = gq;
        w[(q, j)] = gq;
    }
    for j in 0..n {
        let g = v[(j, p)];
        let hh = v[(j, q)];
        v[(j, p)] = g - s * (hh + g * tau);
        v[(j, q)] = hh + s * (g - hh * tau);
    }
}

/// Sort eigenpairs descending and transpose the accumulated rotations so the
/// returned basis rows are eigenvectors (`A = Oᵀ diag(λ) O`).
fn finish(w: Matrix, v: Matrix) -> SpectralDecomposition {
    let n = w.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[(j, j)]
            .partial_cmp(&w[(i, i)])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| w[(k, k)]).collect();
    let basis = Matrix::from_fn(n, n, |i, j| v[(j, order[i])]);
    SpectralDecomposition { eigenvalues, basis }
}

/// PSD part `A⁺ = Oᵀ diag(λ⁺) O` with `λ⁺ = max(λ, 0)`.
///
/// Eigenvalues in `[−τ, τ]` with `τ = 1e-10 · max(1, |λ_max|)` are snapped to
/// zero so roundoff-scale noise does not survive the projection. `A⁺` is the
/// unique trace-minimal matrix dominating both `A` and `0`.
///
/// ```
/// use privgp_core::linalg::{psd_part, SymMatrix};
/// // eigenpairs (3, [1,1]/√2) and (−1, [1,−1]/√2); clipping leaves (3/2)·[[1,1],[1,1]]
/// let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]])?;
/// let plus = psd_part(&a)?;
/// assert!((plus.get(0, 1) - 1.5).abs() < 1e-12);
/// # Ok::<(), privgp_core::Error>(())
/// ```
pub fn psd_part(a: &SymMatrix) -> Result<SymMatrix> {
    let dec = sym_eigen(a)?;
    let lambda_max = dec.eigenvalues.first().copied().unwrap_or(0.0);
    let tau = 1e-10 * lambda_max.abs().max(1.0);
    Ok(dec.reconstruct_with(|l| if l > tau { l } else { 0.0 }))
}
