//! Self-contained log-barrier solver for the trace-minimization programs
//! `min Tr(Σ)` subject to `Σ ⪰ Bᵢ` (i = 1..γ) and `Σ ⪰ 0`, optionally with
//! `Σ` restricted to diagonal matrices.
//!
//! The method follows the central path of
//! `Tr(Σ) − μ·[Σᵢ log det(Σ − Bᵢ) + log det(Σ)]`,
//! taking damped Newton steps over the free entries of `Σ` (the `n(n+1)/2`
//! symmetric entries, or `n` diagonal entries) and shrinking `μ` by a factor
//! of 5 until the barrier gap bound `μ·(γ+1)·n` drops below the requested
//! tolerance. There is no randomness anywhere, so a given problem always
//! yields the same solution.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, CholeskyFactor, SymMatrix};

/// `min Tr(Σ) s.t. Σ ⪰ Bᵢ ∀i, Σ ⪰ 0`, optionally over diagonal `Σ`.
#[derive(Debug, Clone)]
pub struct TraceMinProblem {
    dominated: Vec<SymMatrix>,
    diagonal_only: bool,
}

impl TraceMinProblem {
    pub fn new(dominated: Vec<SymMatrix>, diagonal_only: bool) -> Result<Self> {
        if dominated.is_empty() {
            return Err(Error::InvalidInput(
                "trace-min problem needs at least one dominated matrix".into(),
            ));
        }
        let n = dominated[0].order();
        for b in &dominated {
            if b.order() != n {
                return Err(Error::DimensionMismatch(
                    "dominated matrices have mixed orders".into(),
                ));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(
                    "dominated matrix has non-finite entries".into(),
                ));
            }
        }
        Ok(TraceMinProblem {
            dominated,
            diagonal_only,
        })
    }

    pub fn order(&self) -> usize {
        self.dominated[0].order()
    }

    pub fn constraints(&self) -> &[SymMatrix] {
        &self.dominated
    }

    pub fn diagonal_only(&self) -> bool {
        self.diagonal_only
    }
}

/// Termination state of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Barrier gap bound below tolerance; constraints hold strictly.
    Optimal,
    /// Newton budget exhausted before the gap bound closed.
    MaxIterations,
    /// No strictly feasible interior point could be maintained. Unreachable
    /// for well-posed inputs (a large multiple of the identity is always
    /// strictly feasible); kept for defensive reporting.
    Infeasible,
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub sigma: SymMatrix,
    pub trace: f64,
    /// Total Newton steps taken.
    pub iterations: usize,
    /// Barrier bound `μ·(γ+1)·n` at the last completed centering.
    pub duality_gap_estimate: f64,
    pub status: SdpStatus,
}

/// Default trace-units tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default Newton-step budget.
pub const DEFAULT_MAX_ITER: usize = 500;

const ARMIJO: f64 = 1e-4;
const MAX_CENTERING_STEPS: usize = 60;

/// Free-entry basis bookkeeping: the first `n` coordinates are diagonal
/// entries; off-diagonal pairs (i < j) follow unless `diagonal_only`.
struct BasisLayout {
    n: usize,
    offdiag: Vec<(usize, usize)>,
}

impl BasisLayout {
    fn new(n: usize, diagonal_only: bool) -> Self {
        let mut offdiag = Vec::new();
        if !diagonal_only {
            for i in 0..n {
                for j in i + 1..n {
                    offdiag.push((i, j));
                }
            }
        }
        BasisLayout { n, offdiag }
    }

    fn len(&self) -> usize {
        self.n + self.offdiag.len()
    }

    fn apply_step(&self, sigma: &SymMatrix, step: &[f64], t: f64) -> SymMatrix {
        let mut out = sigma.clone();
        for (i, delta) in step.iter().take(self.n).enumerate() {
            out.set(i, i, out.get(i, i) + t * delta);
        }
        for (k, &(i, j)) in self.offdiag.iter().enumerate() {
            out.set(i, j, out.get(i, j) + t * step[self.n + k]);
        }
        out
    }
}

/// Try to factor all barrier terms `Σ − Bᵢ` and `Σ`; `None` means the
/// candidate left the interior.
fn factor_all(sigma: &SymMatrix, constraints: &[SymMatrix]) -> Option<Vec<CholeskyFactor>> {
    let mut factors = Vec::with_capacity(constraints.len() + 1);
    for b in constraints {
        factors.push(cholesky(&sigma.sub(b), 0.0).ok()?);
    }
    factors.push(cholesky(sigma, 0.0).ok()?);
    Some(factors)
}

fn barrier_value(sigma: &SymMatrix, factors: &[CholeskyFactor], mu: f64) -> f64 {
    let logdets: f64 = factors.iter().map(CholeskyFactor::log_det).sum();
    sigma.trace() - mu * logdets
}

/// Solve the trace-minimization problem to `tol` trace units within
/// `max_iter` total Newton steps.
///
/// The returned solution is strictly feasible. With status `Optimal` the
/// trace is within `tol` of the optimum by the barrier bound; otherwise the
/// best strictly feasible iterate is returned with status `MaxIterations`.
pub fn solve(problem: &TraceMinProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let n = problem.order();
    let gamma = problem.constraints().len();
    let nu = ((gamma + 1) * n) as f64;
    let layout = BasisLayout::new(n, problem.diagonal_only());
    let m = layout.len();

    // Strictly feasible start: Σ₀ = (max Gershgorin bound)⁺·I + I dominates
    // every Bᵢ and the origin with slack at least I.
    let top = problem
        .constraints()
        .iter()
        .map(SymMatrix::gershgorin_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sigma = SymMatrix::scaled_identity(n, top.max(0.0) + 1.0);

    let mut mu = (sigma.trace() / nu).max(1.0);
    let mut newton_steps = 0usize;

    let mut factors = match factor_all(&sigma, problem.constraints()) {
        Some(f) => f,
        None => {
            return Ok(SdpSolution {
                trace: sigma.trace(),
                sigma,
                iterations: 0,
                duality_gap_estimate: f64::INFINITY,
                status: SdpStatus::Infeasible,
            })
        }
    };

    loop {
        // Center at the current μ.
        for _ in 0..MAX_CENTERING_STEPS {
            if newton_steps >= max_iter {
                break;
            }
            let inverses: Vec<SymMatrix> = factors.iter().map(CholeskyFactor::inverse).collect();

            // gradient of Tr(Σ) − μ Σ log det(·) over the free entries
            let mut grad = vec![0.0; m];
            for (i, g) in grad.iter_mut().take(n).enumerate() {
                let inv_sum: f64 = inverses.iter().map(|a| a.get(i, i)).sum();
                *g = 1.0 - mu * inv_sum;
            }
            for (k, &(i, j)) in layout.offdiag.iter().enumerate() {
                let inv_sum: f64 = inverses.iter().map(|a| a.get(i, j)).sum();
                grad[layout.n + k] = -2.0 * mu * inv_sum;
            }

            // Hessian: μ Σ_A tr(A E_k A E_l) over the symmetric basis
            let mut hess = SymMatrix::zeros(m);
            for a in &inverses {
                for i in 0..n {
                    for j in i..n {
                        let v = hess.get(i, j) + mu * a.get(i, j) * a.get(i, j);
                        hess.set(i, j, v);
                    }
                    for (l, &(p, q)) in layout.offdiag.iter().enumerate() {
                        let col = layout.n + l;
                        let v = hess.get(i, col) + 2.0 * mu * a.get(i, p) * a.get(i, q);
                        hess.set(i, col, v);
                    }
                }
                for (k, &(i, j)) in layout.offdiag.iter().enumerate() {
                    for (l, &(p, q)) in layout.offdiag.iter().enumerate().skip(k) {
                        let row = layout.n + k;
                        let col = layout.n + l;
                        let v = hess.get(row, col)
                            + 2.0 * mu * (a.get(i, p) * a.get(j, q) + a.get(i, q) * a.get(j, p));
                        hess.set(row, col, v);
                    }
                }
            }

            // Newton direction H d = −g, with a diagonal bump if the Hessian
            // factorization stalls near the boundary.
            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            let mut bump = 0.0;
            let direction = loop {
                match cholesky(&hess.add_scaled_identity(bump), 0.0) {
                    Ok(f) => break f.solve_vec(&neg_grad),
                    Err(_) => {
                        let scale = hess.max_abs().max(1e-30);
                        bump = if bump == 0.0 {
                            1e-14 * scale
                        } else {
                            bump * 100.0
                        };
                        if bump > scale {
                            return Err(Error::NoConvergence(
                                "barrier Hessian could not be stabilized".into(),
                            ));
                        }
                    }
                }
            };

            let decrement_sq: f64 = neg_grad.iter().zip(&direction).map(|(g, d)| g * d).sum();
            if decrement_sq <= 1e-12 * mu.max(1.0) {
                break; // centered
            }

            // Backtracking line search with interior feasibility.
            let f0 = barrier_value(&sigma, &factors, mu);
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-14 {
                let candidate = layout.apply_step(&sigma, &direction, t);
                if let Some(cand_factors) = factor_all(&candidate, problem.constraints()) {
                    let fc = barrier_value(&candidate, &cand_factors, mu);
                    if fc <= f0 - ARMIJO * t * decrement_sq {
                        sigma = candidate;
                        factors = cand_factors;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            newton_steps += 1;
            if !accepted {
                break; // cannot make progress at this μ; shrink it
            }
        }

        let gap = mu * nu;
        if gap <= tol {
            return Ok(SdpSolution {
                trace: sigma.trace(),
                sigma,
                iterations: newton_steps,
                duality_gap_estimate: gap,
                status: SdpStatus::Optimal,
            });
        }
        if newton_steps >= max_iter {
            return Ok(SdpSolution {
                trace: sigma.trace(),
                sigma,
                iterations: newton_steps,
                duality_gap_estimate: gap,
                status: SdpStatus::MaxIterations,
            });
        }
        mu /= 5.0;
    }
}
