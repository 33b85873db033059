//! Construction of the synthetic-noise covariance Σ for every privacy
//! formulation.
//!
//! For a single sensitive input `s` with tolerance `ξ`, the trace-minimal Σ
//! forcing `Var[f(s)|W] ≥ ξ` has the closed form
//! `Σ_opt = ((K_{s,s}−ξ)^{-1}·K_{X,s}K_{s,X} − K_{X,X} − V)⁺`.
//! Multiple per-point floors (the *weak* formulation) become a trace-min SDP
//! with one constraint per sensitive input; the *strong* formulation lifts
//! the floor to all linear combinations, `Cov[f(S)|W] ⪰ Ξ`, and is again a
//! closed-form PSD projection. Choosing `Ξ = H_{S,S}` for a privacy kernel
//! `H` with `K − H` positive definite extends the construction to arbitrary
//! sensitive regions, even continuous or unbounded ones, through the Gram
//! matrix `G(S)` of RKHS inner products `⟨K(·,xᵢ), K(·,xⱼ)⟩` in the space
//! with kernel `K − H` restricted to `S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::GPModel;
use crate::kernels::{validate_pair, KernelSpec, Validity};
use crate::linalg::{cholesky, psd_part, sym_eigen, CholeskyFactor, SymMatrix};
use crate::quadrature::{integrate, QuadratureSettings};
use crate::sdp::{self, SdpStatus, TraceMinProblem};

/// Where the sensitive inputs live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SensitiveRegion {
    /// An explicit finite list of sensitive points.
    #[serde(rename = "finite")]
    FinitePoints { points: Vec<Vec<f64>> },
    /// An axis-aligned box, discretized with `points` nodes per dimension.
    #[serde(rename = "grid")]
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        points: usize,
    },
    /// Every input location; requires an integrable stationary pair or H=αK.
    #[serde(rename = "whole_space")]
    WholeSpace,
}

/// Declarative description of what must be protected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum PrivacySpec {
    /// One sensitive input `s` with variance floor `ξ`.
    #[serde(rename = "single")]
    Single { s: Vec<f64>, xi: f64 },
    /// Per-point floors `ξᵢ` at sensitive inputs `S`.
    #[serde(rename = "weak")]
    Weak {
        #[serde(rename = "S")]
        s_points: Vec<Vec<f64>>,
        xi: Vec<f64>,
    },
    /// Matrix floor `Cov[f(S)|W] ⪰ Ξ` over all linear combinations.
    #[serde(rename = "strong")]
    Strong {
        #[serde(rename = "S")]
        s_points: Vec<Vec<f64>>,
        #[serde(rename = "Xi")]
        xi_matrix: SymMatrix,
    },
    /// Kernel-defined floor `Ξ = H_{S,S}` over a sensitive region.
    #[serde(rename = "kernel")]
    KernelBased {
        #[serde(rename = "H")]
        privacy_kernel: KernelSpec,
        region: SensitiveRegion,
    },
}

/// Which formulation produced a noise covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseProvenance {
    SingleClosedForm,
    WeakSdp,
    StrongClosedForm,
    DiagonalSdp,
    KernelFinite,
    KernelGrid,
    KernelUniform,
}

/// The synthetic-noise covariance Σ with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseCovariance {
    pub sigma: SymMatrix,
    pub provenance: NoiseProvenance,
    pub trace: f64,
    /// Numerical caveats encountered while constructing Σ (jitter engaged,
    /// solver hit its iteration cap, ...). Empty in the clean case.
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl NoiseCovariance {
    fn new(sigma: SymMatrix, provenance: NoiseProvenance, warnings: Vec<String>) -> Self {
        let trace = sigma.trace();
        NoiseCovariance {
            sigma,
            provenance,
            trace,
            warnings,
        }
    }
}

/// Descriptor of the region a Gram matrix `G(S)` was computed over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramRegion {
    Finite {
        count: usize,
    },
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        points: usize,
    },
    WholeSpace,
}

/// Gram matrix of RKHS inner products `⟨K(·,xᵢ), K(·,xⱼ)⟩_{N_{K−H}(S)}`.
#[derive(Debug, Clone)]
pub struct GramG {
    pub matrix: SymMatrix,
    pub region: GramRegion,
    /// For grid regions: max-norm differences between successive resolutions.
    pub convergence: Vec<f64>,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// finite formulations

fn check_model_data(model: &GPModel, data_x: &[Vec<f64>]) -> Result<()> {
    if data_x.is_empty() {
        return Err(Error::InvalidInput("no training inputs".into()));
    }
    if data_x[0].len() != model.kernel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "training inputs have dimension {}, kernel expects {}",
            data_x[0].len(),
            model.kernel.dim()
        )));
    }
    Ok(())
}

/// Constraint matrix of a per-point variance floor:
/// `B = (K_{s,s}−ξ)^{-1}·K_{X,s}K_{s,X} − K_{X,X} − V`.
fn point_constraint(
    model: &GPModel,
    data_x: &[Vec<f64>],
    kxx_plus_v: &SymMatrix,
    s: &[f64],
    xi: f64,
) -> Result<SymMatrix> {
    let kss = model.kernel.eval(s, s)?;
    if !xi.is_finite() || xi <= 0.0 || xi >= kss {
        return Err(Error::InvalidTolerance(format!(
            "tolerance must satisfy 0 < xi < K(s,s) = {kss}, got {xi}"
        )));
    }
    let kxs: Vec<f64> = data_x
        .iter()
        .map(|x| model.kernel.eval(x, s))
        .collect::<Result<_>>()?;
    let scale = 1.0 / (kss - xi);
    Ok(SymMatrix::from_fn(data_x.len(), |i, j| {
        scale * kxs[i] * kxs[j] - kxx_plus_v.get(i, j)
    }))
}

fn kxx_plus_v(model: &GPModel, data_x: &[Vec<f64>]) -> Result<SymMatrix> {
    let kxx = model.kernel.gram_sym(data_x)?;
    let v = model.noise_matrix(data_x.len())?;
    Ok(kxx.add(&v))
}

/// Minimum-trace Σ for one sensitive input: the PSD projection of the single
/// constraint matrix. The released variance at `s` then sits at or above `ξ`.
pub fn single_sensitive_noise(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s: &[f64],
    xi: f64,
) -> Result<NoiseCovariance> {
    check_model_data(model, data_x)?;
    let base = kxx_plus_v(model, data_x)?;
    let b = point_constraint(model, data_x, &base, s, xi)?;
    let sigma = psd_part(&b)?;
    Ok(NoiseCovariance::new(
        sigma,
        NoiseProvenance::SingleClosedForm,
        Vec::new(),
    ))
}

fn validate_weak_inputs(s_points: &[Vec<f64>], xi: &[f64]) -> Result<()> {
    if s_points.is_empty() {
        return Err(Error::InvalidInput("no sensitive inputs given".into()));
    }
    if s_points.len() != xi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} sensitive inputs vs {} tolerances",
            s_points.len(),
            xi.len()
        )));
    }
    Ok(())
}

/// Weakly privacy-aware Σ: minimum trace subject to one variance floor per
/// sensitive input, solved as an SDP. A solver that stops on its iteration
/// cap is surfaced as a warning, not an error.
pub fn weak_noise(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s_points: &[Vec<f64>],
    xi: &[f64],
) -> Result<NoiseCovariance> {
    weak_or_diagonal(model, data_x, s_points, xi, false)
}

/// Same floors as [`weak_noise`] but with Σ restricted to a diagonal matrix
/// (the classical independent-noise obfuscation, for comparison).
pub fn diagonal_noise(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s_points: &[Vec<f64>],
    xi: &[f64],
) -> Result<NoiseCovariance> {
    weak_or_diagonal(model, data_x, s_points, xi, true)
}

fn weak_or_diagonal(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s_points: &[Vec<f64>],
    xi: &[f64],
    diagonal_only: bool,
) -> Result<NoiseCovariance> {
    per_point_floor_noise(
        model,
        data_x,
        s_points,
        xi,
        diagonal_only,
        sdp::DEFAULT_TOL,
        sdp::DEFAULT_MAX_ITER,
    )
}

/// Per-point-floor SDP solve with explicit solver settings; the weak and
/// diagonal constructors delegate here with the defaults.
pub fn per_point_floor_noise(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s_points: &[Vec<f64>],
    xi: &[f64],
    diagonal_only: bool,
    tol: f64,
    max_iter: usize,
) -> Result<NoiseCovariance> {
    check_model_data(model, data_x)?;
    validate_weak_inputs(s_points, xi)?;
    let base = kxx_plus_v(model, data_x)?;
    let constraints: Vec<SymMatrix> = s_points
        .iter()
        .zip(xi)
        .map(|(s, &x)| point_constraint(model, data_x, &base, s, x))
        .collect::<Result<_>>()?;
    let problem = TraceMinProblem::new(constraints, diagonal_only)?;
    let solution = sdp::solve(&problem, tol, max_iter)?;
    let mut warnings = Vec::new();
    match solution.status {
        SdpStatus::Optimal => {}
        SdpStatus::MaxIterations => warnings.push(format!(
            "SDP stopped at the iteration cap with gap estimate {:.3e}",
            solution.duality_gap_estimate
        )),
        SdpStatus::Infeasible => {
            return Err(Error::NoConvergence(
                "SDP lost strict feasibility; should not happen for these problems".into(),
            ))
        }
    }
    let provenance = if diagonal_only {
        NoiseProvenance::DiagonalSdp
    } else {
        NoiseProvenance::WeakSdp
    };
    Ok(NoiseCovariance::new(solution.sigma, provenance, warnings))
}

/// Strongly privacy-aware Σ: enforce `Cov[f(S)|W] ⪰ Ξ`, closed form
/// `(K_{X,S}(K_{S,S}−Ξ)^{-1}K_{S,X} − K_{X,X} − V)⁺`.
pub fn strong_noise(
    model: &GPModel,
    data_x: &[Vec<f64>],
    s_points: &[Vec<f64>],
    xi_matrix: &SymMatrix,
) -> Result<NoiseCovariance> {
    check_model_data(model, data_x)?;
    if s_points.is_empty() {
        return Err(Error::InvalidInput("no sensitive inputs given".into()));
    }
    if xi_matrix.order() != s_points.len() {
        return Err(Error::DimensionMismatch(format!(
            "Xi has order {}, expected {}",
            xi_matrix.order(),
            s_points.len()
        )));
    }
    // Ξ ⪰ 0
    let xi_dec = sym_eigen(xi_matrix)?;
    if xi_dec.min_eigenvalue() < -1e-10 * xi_matrix.max_abs().max(1.0) {
        return Err(Error::InvalidXi(format!(
            "Xi has eigenvalue {:.3e}; it must be PSD",
            xi_dec.min_eigenvalue()
        )));
    }
    // K_{S,S} − Ξ ≻ 0
    let kss = model.kernel.gram_sym(s_points)?;
    let gap = kss.sub(xi_matrix);
    let gap_factor = cholesky(&gap, 0.0)
        .map_err(|_| Error::InvalidXi("K_{S,S} - Xi must be positive definite".into()))?;

    let base = kxx_plus_v(model, data_x)?;
    let kxs = model.kernel.gram(data_x, s_points)?;
    // (K_{S,S}−Ξ)^{-1} K_{S,X}
    let solved = gap_factor.solve_matrix(&kxs.transpose());
    let nystroem = kxs.matmul(&solved);
    let b = SymMatrix::symmetrize(&nystroem.sub(&base.to_matrix()))?;
    let sigma = psd_part(&b)?;
    Ok(NoiseCovariance::new(
        sigma,
        NoiseProvenance::StrongClosedForm,
        Vec::new(),
    ))
}

// ---------------------------------------------------------------------------
// kernel-based formulations over finite / gridded / unbounded regions

/// Jitter policy for near-singular `K_{S,S} − H_{S,S}` on dense sensitive
/// grids: retry once with `1e-10·mean(diag)` and record a warning carrying a
/// condition-number estimate.
fn factor_with_jitter_policy(
    m: &SymMatrix,
    label: &str,
    warnings: &mut Vec<String>,
) -> Result<CholeskyFactor> {
    match cholesky(m, 0.0) {
        Ok(f) => Ok(f),
        Err(Error::NotPositiveDefinite(_)) => {
            let jitter = (1e-10 * m.trace() / m.order() as f64).max(f64::MIN_POSITIVE);
            let cond_estimate = m.gershgorin_max() / jitter;
            warnings.push(format!(
                "{label} is numerically singular (condition estimate {cond_estimate:.2e}); \
                 applied diagonal jitter {jitter:.2e}"
            ));
            if cond_estimate > 1e12 {
                log::warn!(
                    "{label}: condition estimate {cond_estimate:.2e} exceeds 1e12; jitter engaged"
                );
            }
            cholesky(m, jitter)
        }
        Err(e) => Err(e),
    }
}

fn reject_duplicate_points(points: &[Vec<f64>]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::InvalidInput(format!(
                    "sensitive points {i} and {j} coincide; K_{{S,S}} would be singular"
                )));
            }
        }
    }
    Ok(())
}

/// `G(S)` for a finite sensitive set:
/// `G[i][j] = K_{xᵢ,S}(K_{S,S}−H_{S,S})^{-1}K_{S,xⱼ}`.
pub fn gram_g_finite(
    base: &KernelSpec,
    privacy: &KernelSpec,
    s_points: &[Vec<f64>],
    data_x: &[Vec<f64>],
) -> Result<GramG> {
    if let Validity::Invalid(reason) = validate_pair(base, privacy) {
        return Err(Error::InvalidKernelPair(reason));
    }
    if s_points.is_empty() {
        return Err(Error::InvalidInput("sensitive set is empty".into()));
    }
    reject_duplicate_points(s_points)?;
    let mut warnings = Vec::new();
    let kss = base.gram_sym(s_points)?;
    let hss = privacy.gram_sym(s_points)?;
    let m = kss.sub(&hss);
    let factor = factor_with_jitter_policy(&m, "K_{S,S} - H_{S,S}", &mut warnings)?;
    let kxs = base.gram(data_x, s_points)?;
    let solved = factor.solve_matrix(&kxs.transpose());
    let g = SymMatrix::symmetrize(&kxs.matmul(&solved))?;
    Ok(GramG {
        matrix: g,
        region: GramRegion::Finite {
            count: s_points.len(),
        },
        convergence: Vec::new(),
        warnings,
    })
}

/// Tensor grid over the box `[lo, hi]` with `points` nodes per non-degenerate
/// dimension. A degenerate box (`lo == hi` in every coordinate) collapses to
/// the single point `lo`.
pub fn grid_points(lo: &[f64], hi: &[f64], points: usize) -> Result<Vec<Vec<f64>>> {
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::DimensionMismatch(
            "grid bounds must have equal nonzero length".into(),
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Err(Error::InvalidInput(
            "grid lower bound exceeds upper bound".into(),
        ));
    }
    if points == 0 {
        return Err(Error::InvalidInput("grid needs at least one point".into()));
    }
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| {
            if a == b || points == 1 {
                vec![a]
            } else {
                (0..points)
                    .map(|k| a + (b - a) * k as f64 / (points - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

/// `G(S)` over a gridded compact region, computed at each resolution in the
/// sequence. The result holds the densest grid's Gram matrix plus the
/// max-norm differences between successive resolutions as a convergence
/// diagnostic (grids refine toward the continuum limit).
pub fn gram_g_grid(
    base: &KernelSpec,
    privacy: &KernelSpec,
    lo: &[f64],
    hi: &[f64],
    resolutions: &[usize],
    data_x: &[Vec<f64>],
) -> Result<GramG> {
    if resolutions.is_empty() {
        return Err(Error::InvalidInput("resolution sequence is empty".into()));
    }
    let mut convergence = Vec::new();
    let mut warnings = Vec::new();
    let mut previous: Option<SymMatrix> = None;
    for &resolution in resolutions {
        let s = grid_points(lo, hi, resolution)?;
        let g = gram_g_finite(base, privacy, &s, data_x)?;
        warnings.extend(g.warnings);
        if let Some(prev) = &previous {
            convergence.push(g.matrix.max_abs_diff(prev));
        }
        previous = Some(g.matrix);
    }
    Ok(GramG {
        matrix: previous.expect("at least one resolution"),
        region: GramRegion::Grid {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            points: *resolutions.last().expect("non-empty"),
        },
        convergence,
        warnings,
    })
}

/// `G(ℝ^d)` for a stationary pair: entries are the inner products
/// `(2π)^{−d/2} ∫ cos(ωᵀ(x−x′))·R̃_K²(ω)/(R̃_K(ω)−R̃_H(ω)) dω`,
/// evaluated by adaptive quadrature after reducing to a radial 1-D integral
/// (`d ≤ 3`). The scaled-copy case `H = αK` short-circuits to the exact
/// identity `G = (1−α)^{-1}·K_{X,X}`, as does a squared-exponential pair
/// with `θ = θ₀` (which is the same kernel shape, `H = c·K`).
///
/// Divergence is detected before integrating: at the validity-region
/// boundary `θ = c^{2/d}·θ₀` the transform difference vanishes at the
/// origin and the integrand blows up like `‖ω‖^{−2}`, which is not
/// integrable for `d ≤ 2`.
pub fn gram_g_uniform_stationary(
    base: &KernelSpec,
    privacy: &KernelSpec,
    data_x: &[Vec<f64>],
    settings: &QuadratureSettings,
) -> Result<GramG> {
    if let Validity::Invalid(reason) = validate_pair(base, privacy) {
        return Err(Error::InvalidKernelPair(reason));
    }
    let kxx = base.gram_sym(data_x)?;

    // H = α·K exactly: G(ℝ^d) = (1−α)^{-1}·K_{X,X}
    if let KernelSpec::ScaledCopy { alpha, base: inner } = privacy {
        if inner.as_ref() == base {
            return Ok(uniform_closed_form(&kxx, *alpha));
        }
    }
    let (ck, theta0, d) = base.as_sqexp().ok_or_else(|| {
        Error::UnsupportedFamily("uniform solution needs squared-exponential kernels".into())
    })?;
    let (ch, theta, _) = privacy.as_sqexp().ok_or_else(|| {
        Error::UnsupportedFamily("uniform solution needs squared-exponential kernels".into())
    })?;
    let c = ch / ck;
    if (theta - theta0).abs() <= 1e-12 * theta0 {
        // same shape: H = c·K
        return Ok(uniform_closed_form(&kxx, c));
    }

    // Finiteness: the transform ratio R̃_K/R̃_H attains its minimum
    // c^{-1}(θ/θ₀)^{d/2} at ω = 0 (θ < θ₀ here). If that minimum is 1 the
    // denominator vanishes quadratically at the origin and the integral
    // diverges for d ≤ 2.
    let ratio0 = if c == 0.0 {
        f64::INFINITY
    } else {
        (theta / theta0).powf(d as f64 / 2.0) / c
    };
    if ratio0 <= 1.0 + 1e-12 {
        // For d >= 3 the boundary integral is actually finite, but the
        // integrand pole at the origin is outside what the quadrature here
        // handles; the pair is required to sit strictly inside the region.
        return Err(Error::NotIntegrable(format!(
            "transform ratio at the origin is {ratio0:.6}; at the region boundary \
             theta = c^(2/d)·theta0 the inner-product integral diverges for d <= 2 \
             (and is not supported numerically for d = {d})"
        )));
    }
    if d > 3 {
        return Err(Error::UnsupportedFamily(format!(
            "radial reduction implemented for d <= 3, got d = {d}"
        )));
    }

    // Integrand q(r) = R̃_K²(r)/(R̃_K(r) − R̃_H(r)) on the radial axis.
    let rk =
        move |r: f64| ck * (2.0 * theta0).powf(-(d as f64) / 2.0) * (-r * r / (4.0 * theta0)).exp();
    let rh =
        move |r: f64| ch * (2.0 * theta).powf(-(d as f64) / 2.0) * (-r * r / (4.0 * theta)).exp();
    let q = move |r: f64| {
        let k = rk(r);
        k * k / (k - rh(r))
    };

    // Cutoff: the integrand is bounded by R̃_K·ratio₀/(ratio₀−1); extend the
    // radius until the bound (with the radial surface factor) drops below
    // tail_fraction of the peak.
    let peak = q(0.0);
    let slack = if ratio0.is_finite() {
        ratio0 / (ratio0 - 1.0)
    } else {
        1.0
    };
    let mut omega_max = (4.0 * theta0 * 30.0f64).sqrt();
    while rk(omega_max) * slack * omega_max.powi(d as i32 - 1) > settings.tail_fraction * peak {
        omega_max *= 1.5;
        if !omega_max.is_finite() {
            return Err(Error::NotIntegrable("tail cutoff search diverged".into()));
        }
    }

    let n = data_x.len();
    let mut g = SymMatrix::zeros(n);
    let norm = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    for i in 0..n {
        for j in i..n {
            let dist2: f64 = data_x[i]
                .iter()
                .zip(&data_x[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let u = dist2.sqrt();
            let value = match d {
                // even integrand: ∫_ℝ cos(ωu) q = 2∫_0^∞
                1 => {
                    let (v, _) = integrate(
                        |w| (w * u).cos() * q(w),
                        0.0,
                        omega_max,
                        settings.rel_tol,
                        1e-300,
                        settings.max_panels,
                    );
                    norm * 2.0 * v
                }
                // polar: ∫_{ℝ²} cos(ωᵀΔ) q = 2π ∫_0^∞ q(r)·r·J₀(ru) dr
                2 => {
                    let (v, _) = integrate(
                        |r| q(r) * r * bessel_j0(r * u),
                        0.0,
                        omega_max,
                        settings.rel_tol,
                        1e-300,
                        settings.max_panels,
                    );
                    norm * 2.0 * std::f64::consts::PI * v
                }
                // spherical: ∫_{ℝ³} cos(ωᵀΔ) q = (4π/u) ∫_0^∞ q(r)·r·sin(ru) dr
                3 => {
                    let (v, _) = if u == 0.0 {
                        integrate(
                            |r| q(r) * r * r,
                            0.0,
                            omega_max,
                            settings.rel_tol,
                            1e-300,
                            settings.max_panels,
                        )
                    } else {
                        integrate(
                            |r| q(r) * r * (r * u).sin() / u,
                            0.0,
                            omega_max,
                            settings.rel_tol,
                            1e-300,
                            settings.max_panels,
                        )
                    };
                    norm * 4.0 * std::f64::consts::PI * v
                }
                _ => unreachable!("d <= 3 enforced above"),
            };
            g.set(i, j, value);
        }
    }
    Ok(GramG {
        matrix: g,
        region: GramRegion::WholeSpace,
        convergence: Vec::new(),
        warnings: Vec::new(),
    })
}

fn uniform_closed_form(kxx: &SymMatrix, alpha: f64) -> GramG {
    GramG {
        matrix: kxx.scaled(1.0 / (1.0 - alpha)),
        region: GramRegion::WholeSpace,
        convergence: Vec::new(),
        warnings: Vec::new(),
    }
}

/// Bessel function of the first kind, order zero (Abramowitz & Stegun
/// rational approximations; absolute error below 1e-7, ample for the
/// quadrature tolerance used here).
fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 8.0 {
        let y = x * x;
        let p1 = 57_568_490_574.0
            + y * (-13_362_590_354.0
                + y * (651_619_640.7
                    + y * (-11_214_424.18 + y * (77_392.330_17 + y * (-184.905_245_6)))));
        let p2 = 57_568_490_411.0
            + y * (1_029_532_985.0
                + y * (9_494_680.718 + y * (59_272.648_53 + y * (267.853_271_2 + y))));
        p1 / p2
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 0.785_398_164;
        let p1 = 1.0
            + y * (-0.001_098_628_627
                + y * (0.000_027_345_104_07
                    + y * (-0.000_002_073_370_639 + y * 0.000_000_209_388_721_1)));
        let p2 = -0.015_624_999_95
            + y * (0.000_143_048_876_5
                + y * (-0.000_006_911_147_651
                    + y * (0.000_000_762_109_516_1 + y * (-0.000_000_093_493_515_2))));
        (std::f64::consts::FRAC_2_PI / ax).sqrt() * (xx.cos() * p1 - z * xx.sin() * p2)
    }
}

/// `Σ_opt(S) = (G(S) − K_{X,X} − V)⁺`.
pub fn noise_from_gram(g: &GramG, kxx: &SymMatrix, v: &SymMatrix) -> Result<NoiseCovariance> {
    if g.matrix.order() != kxx.order() || kxx.order() != v.order() {
        return Err(Error::DimensionMismatch(format!(
            "G order {}, K order {}, V order {}",
            g.matrix.order(),
            kxx.order(),
            v.order()
        )));
    }
    let sigma = psd_part(&g.matrix.sub(kxx).sub(v))?;
    let provenance = match g.region {
        GramRegion::Finite { .. } => NoiseProvenance::KernelFinite,
        GramRegion::Grid { .. } => NoiseProvenance::KernelGrid,
        GramRegion::WholeSpace => NoiseProvenance::KernelUniform,
    };
    Ok(NoiseCovariance::new(sigma, provenance, g.warnings.clone()))
}

/// Dyadic resolution ladder ending at `points` (e.g. 33 → [5, 9, 17, 33]),
/// used when a grid region is given only by its final resolution.
pub fn dyadic_resolutions(points: usize) -> Vec<usize> {
    let mut ladder = vec![points.max(1)];
    let mut p = points.max(1);
    while p > 5 {
        p = p / 2 + 1;
        ladder.push(p);
    }
    ladder.reverse();
    ladder
}

/// Compute Σ for a privacy specification (the dispatch used by the pipeline
/// and CLI).
pub fn noise_for_spec(
    model: &GPModel,
    data_x: &[Vec<f64>],
    spec: &PrivacySpec,
) -> Result<NoiseCovariance> {
    match spec {
        PrivacySpec::Single { s, xi } => single_sensitive_noise(model, data_x, s, *xi),
        PrivacySpec::Weak { s_points, xi } => weak_noise(model, data_x, s_points, xi),
        PrivacySpec::Strong {
            s_points,
            xi_matrix,
        } => strong_noise(model, data_x, s_points, xi_matrix),
        PrivacySpec::KernelBased {
            privacy_kernel,
            region,
        } => {
            let g = match region {
                SensitiveRegion::FinitePoints { points } => {
                    gram_g_finite(&model.kernel, privacy_kernel, points, data_x)?
                }
                SensitiveRegion::Grid { lo, hi, points } => gram_g_grid(
                    &model.kernel,
                    privacy_kernel,
                    lo,
                    hi,
                    &dyadic_resolutions(*points),
                    data_x,
                )?,
                SensitiveRegion::WholeSpace => gram_g_uniform_stationary(
                    &model.kernel,
                    privacy_kernel,
                    data_x,
                    &QuadratureSettings::default(),
                )?,
            };
            let kxx = model.kernel.gram_sym(data_x)?;
            let v = model.noise_matrix(data_x.len())?;
            noise_from_gram(&g, &kxx, &v)
        }
    }
}

/// Sensitive probe points implied by a privacy spec (used for verification).
/// For `WholeSpace` the training inputs serve as the finite probe set.
pub fn probe_points(spec: &PrivacySpec, data_x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    Ok(match spec {
        PrivacySpec::Single { s, .. } => vec![s.clone()],
        PrivacySpec::Weak { s_points, .. } | PrivacySpec::Strong { s_points, .. } => {
            s_points.clone()
        }
        PrivacySpec::KernelBased { region, .. } => match region {
            SensitiveRegion::FinitePoints { points } => points.clone(),
            SensitiveRegion::Grid { lo, hi, points } => grid_points(lo, hi, *points)?,
            SensitiveRegion::WholeSpace => data_x.to_vec(),
        },
    })
}
