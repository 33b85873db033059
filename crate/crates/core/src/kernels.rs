//! Stationary kernels, Gram matrices, Fourier transforms, and validity
//! checking of privacy kernel pairs `(K, H)`.
//!
//! Two families ship: the squared exponential `K(x,y) = c·exp{−θ‖x−y‖²}` and
//! scaled copies `H = α·K` with `α ∈ [0, 1)`. The Fourier convention is
//! `f̃(ω) = (2π)^{−d/2} ∫ f(x) e^{−iωᵀx} dx`, under which the squared
//! exponential transforms to `c·(2θ)^{−d/2}·exp{−‖ω‖²/(4θ)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

/// A stationary covariance function with parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum KernelSpec {
    /// `K(x, y) = c · exp{−θ ‖x − y‖²}` on `ℝ^d`.
    #[serde(rename = "sqexp")]
    SquaredExponential {
        /// Amplitude `c ≥ 0` (the value at zero lag).
        #[serde(rename = "c")]
        amplitude: f64,
        /// Inverse squared lengthscale `θ > 0`.
        #[serde(rename = "theta")]
        theta: f64,
        /// Input dimension.
        #[serde(rename = "d")]
        dim: usize,
    },
    /// `H = α · base` with `α ∈ [0, 1)`.
    #[serde(rename = "scaled")]
    ScaledCopy { alpha: f64, base: Box<KernelSpec> },
}

impl KernelSpec {
    pub fn squared_exponential(amplitude: f64, theta: f64, dim: usize) -> Result<Self> {
        let spec = KernelSpec::SquaredExponential {
            amplitude,
            theta,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn scaled_copy(base: KernelSpec, alpha: f64) -> Result<Self> {
        let spec = KernelSpec::ScaledCopy {
            alpha,
            base: Box::new(base),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Check parameter invariants (also called after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::SquaredExponential {
                amplitude,
                theta,
                dim,
            } => {
                if !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "kernel amplitude must be finite and >= 0, got {amplitude}"
                    )));
                }
                if !theta.is_finite() || *theta <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "kernel theta must be finite and > 0, got {theta}"
                    )));
                }
                if *dim == 0 {
                    return Err(Error::InvalidInput("kernel dimension must be >= 1".into()));
                }
                Ok(())
            }
            KernelSpec::ScaledCopy { alpha, base } => {
                if !alpha.is_finite() || *alpha < 0.0 || *alpha >= 1.0 {
                    return Err(Error::InvalidInput(format!(
                        "scaled-copy alpha must lie in [0, 1), got {alpha}"
                    )));
                }
                base.validate()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::SquaredExponential { dim, .. } => *dim,
            KernelSpec::ScaledCopy { base, .. } => base.dim(),
        }
    }

    /// Value at zero lag, `K(x, x)`.
    pub fn amplitude(&self) -> f64 {
        match self {
            KernelSpec::SquaredExponential { amplitude, .. } => *amplitude,
            KernelSpec::ScaledCopy { alpha, base } => alpha * base.amplitude(),
        }
    }

    /// Resolve to effective squared-exponential parameters `(c, θ, d)`,
    /// flattening scaled copies.
    pub fn as_sqexp(&self) -> Option<(f64, f64, usize)> {
        match self {
            KernelSpec::SquaredExponential {
                amplitude,
                theta,
                dim,
            } => Some((*amplitude, *theta, *dim)),
            KernelSpec::ScaledCopy { alpha, base } => {
                base.as_sqexp().map(|(c, theta, d)| (alpha * c, theta, d))
            }
        }
    }

    /// Same kernel with the amplitude multiplied by `s` (used when fitting a
    /// signal variance onto a unit-amplitude correlation).
    pub fn scale_amplitude(&self, s: f64) -> KernelSpec {
        match self {
            KernelSpec::SquaredExponential {
                amplitude,
                theta,
                dim,
            } => KernelSpec::SquaredExponential {
                amplitude: amplitude * s,
                theta: *theta,
                dim: *dim,
            },
            KernelSpec::ScaledCopy { alpha, base } => KernelSpec::ScaledCopy {
                alpha: *alpha,
                base: Box::new(base.scale_amplitude(s)),
            },
        }
    }

    /// Evaluate `K(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "kernel expects dimension {d}, got points of dimension {} and {}",
                x.len(),
                y.len()
            )));
        }
        if !x.iter().chain(y).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "kernel input has non-finite coordinates".into(),
            ));
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::SquaredExponential {
                amplitude, theta, ..
            } => {
                let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                amplitude * (-theta * r2).exp()
            }
            KernelSpec::ScaledCopy { alpha, base } => alpha * base.eval_unchecked(x, y),
        }
    }

    /// Gram matrix `(K(pᵢ, qⱼ))_{ij}`.
    pub fn gram(&self, p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<Matrix> {
        let d = self.dim();
        for pt in p.iter().chain(q) {
            if pt.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "gram point of dimension {} vs kernel dimension {d}",
                    pt.len()
                )));
            }
            if !pt.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput(
                    "gram point has non-finite coordinates".into(),
                ));
            }
        }
        Ok(Matrix::from_fn(p.len(), q.len(), |i, j| {
            self.eval_unchecked(&p[i], &q[j])
        }))
    }

    /// Symmetric Gram matrix `K_{P,P}`, exactly symmetric by construction.
    pub fn gram_sym(&self, p: &[Vec<f64>]) -> Result<SymMatrix> {
        let g = self.gram(p, p)?;
        SymMatrix::symmetrize(&g)
    }

    /// Fourier transform `R̃(ω)` of the stationary part at frequency `ω`.
    pub fn fourier(&self, omega: &[f64]) -> Result<f64> {
        let d = self.dim();
        if omega.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "fourier expects dimension {d}, got {}",
                omega.len()
            )));
        }
        match self {
            KernelSpec::SquaredExponential {
                amplitude, theta, ..
            } => {
                let w2: f64 = omega.iter().map(|w| w * w).sum();
                Ok(amplitude * (2.0 * theta).powf(-(d as f64) / 2.0) * (-w2 / (4.0 * theta)).exp())
            }
            KernelSpec::ScaledCopy { alpha, base } => Ok(alpha * base.fourier(omega)?),
        }
    }
}

/// Outcome of a kernel-pair validity check.
#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    Valid,
    Invalid(String),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Closed-form validity region for a squared-exponential pair: with
/// `K = c_K·exp{−θ₀r²}` and `H = c_H·exp{−θr²}` and `c = c_H/c_K`, the pair
/// is valid iff `0 ≤ c < 1` and `c^{2/d}·θ₀ ≤ θ ≤ θ₀`. Inside the region the
/// transform ratio `R̃_K/R̃_H` is at least one everywhere, so `K − H` is
/// positive definite; `c = 1` is excluded because the difference then
/// vanishes identically.
pub fn gaussian_pair_valid(theta0: f64, c: f64, theta: f64, d: usize) -> bool {
    (0.0..1.0).contains(&c) && c.powf(2.0 / d as f64) * theta0 <= theta && theta <= theta0
}

/// Validate the privacy pair `(K, H)`: `Valid` iff `K − H` is positive
/// definite. Uses the closed-form region for squared-exponential pairs and
/// the scalar condition `α < 1` for scaled copies. For unsupported
/// combinations use [`validate_pair_numeric`].
pub fn validate_pair(base: &KernelSpec, privacy: &KernelSpec) -> Validity {
    if base.validate().is_err() || privacy.validate().is_err() {
        return Validity::Invalid("kernel parameters out of range".into());
    }
    if base.dim() != privacy.dim() {
        return Validity::Invalid(format!(
            "dimension mismatch: K has d={}, H has d={}",
            base.dim(),
            privacy.dim()
        ));
    }
    // H = α·K with the exact same base: valid for α ∈ [0, 1) whatever the family.
    if let KernelSpec::ScaledCopy { alpha, base: inner } = privacy {
        if inner.as_ref() == base {
            return if *alpha < 1.0 {
                Validity::Valid
            } else {
                Validity::Invalid(format!("scaled copy needs alpha < 1, got {alpha}"))
            };
        }
    }
    match (base.as_sqexp(), privacy.as_sqexp()) {
        (Some((ck, theta0, d)), Some((ch, theta, _))) => {
            if ck <= 0.0 {
                return Validity::Invalid("base kernel amplitude must be positive".into());
            }
            let c = ch / ck;
            if c >= 1.0 {
                return Validity::Invalid(format!(
                    "amplitude ratio c = {c:.6} >= 1; the case c = 1 (and beyond) is excluded"
                ));
            }
            if c < 0.0 {
                return Validity::Invalid("amplitude ratio must be non-negative".into());
            }
            if theta > theta0 {
                return Validity::Invalid(format!(
                    "theta = {theta} exceeds theta0 = {theta0}; transform ratio decays"
                ));
            }
            let lower = c.powf(2.0 / d as f64) * theta0;
            if theta < lower {
                return Validity::Invalid(format!(
                    "theta = {theta} below c^(2/d)·theta0 = {lower:.6}"
                ));
            }
            Validity::Valid
        }
        _ => Validity::Invalid(
            "no closed-form region for this family combination; \
             use validate_pair_numeric as a sufficient check"
                .into(),
        ),
    }
}

/// Sufficient numerical check for future kernel families: samples
/// `R̃_K − R̃_H` on an axis-aligned frequency grid over `[0, omega_max]` and
/// requires it non-negative everywhere with at least one strictly positive
/// sample. Passing the check certifies nothing beyond the sampled grid, so
/// treat it as a screen, not a proof.
pub fn validate_pair_numeric(
    base: &KernelSpec,
    privacy: &KernelSpec,
    omega_max: f64,
    samples: usize,
) -> Validity {
    if base.dim() != privacy.dim() {
        return Validity::Invalid("dimension mismatch".into());
    }
    let d = base.dim();
    let mut strictly_positive = false;
    for k in 0..samples {
        let r = omega_max * k as f64 / (samples.max(2) - 1) as f64;
        // radial sampling is enough for the radially symmetric families here
        let mut omega = vec![0.0; d];
        omega[0] = r;
        let fk = match base.fourier(&omega) {
            Ok(v) => v,
            Err(e) => return Validity::Invalid(format!("base transform failed: {e}")),
        };
        let fh = match privacy.fourier(&omega) {
            Ok(v) => v,
            Err(e) => return Validity::Invalid(format!("privacy transform failed: {e}")),
        };
        if fk - fh < -1e-14 * fk.abs().max(1e-300) {
            return Validity::Invalid(format!(
                "transform difference negative at |omega| = {r:.6}: {:.3e}",
                fk - fh
            ));
        }
        if fk - fh > 0.0 {
            strictly_positive = true;
        }
    }
    if strictly_positive {
        Validity::Valid
    } else {
        Validity::Invalid("transform difference identically zero on the sampled grid".into())
    }
}

/// A validated privacy kernel pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPair {
    base: KernelSpec,
    privacy: KernelSpec,
}

impl KernelPair {
    /// Construct, enforcing `validate_pair(base, privacy) == Valid`.
    pub fn new(base: KernelSpec, privacy: KernelSpec) -> Result<Self> {
        match validate_pair(&base, &privacy) {
            Validity::Valid => Ok(KernelPair { base, privacy }),
            Validity::Invalid(reason) => Err(Error::InvalidKernelPair(reason)),
        }
    }

    pub fn base(&self) -> &KernelSpec {
        &self.base
    }

    pub fn privacy(&self) -> &KernelSpec {
        &self.privacy
    }
}
