//! Privacy-aware Gaussian process regression.
//!
//! A data owner wants to publish a GP regression model without letting users
//! predict the response accurately at certain *sensitive inputs*. The owner
//! adds a synthetic noise vector `Z ~ N(0, Σ)` to the responses, where `Σ` is
//! the minimum-trace covariance matrix that pushes the released model's
//! predictive variance above a prescribed tolerance at every sensitive input.
//! The obfuscated data, together with the model and `Σ`, can then be released:
//! the GP predictor built from the disclosed quantities is the best possible,
//! so no user can undercut the variance floor.
//!
//! The crate provides:
//!
//! - [`linalg`]: dense symmetric eigendecomposition (Jacobi), PSD projection,
//!   and Cholesky solves, the numeric substrate for everything else;
//! - [`kernels`]: stationary kernel evaluation, Gram matrices, Fourier
//!   transforms, and validity checks for kernel pairs `(K, H)`;
//! - [`gp`]: GP posteriors under correlated additive noise and closed-form
//!   maximum-likelihood fitting of a constant mean and signal variance;
//! - [`sdp`]: a self-contained log-barrier solver for the trace-minimization
//!   semidefinite programs `min Tr(Σ) s.t. Σ ⪰ Bᵢ, Σ ⪰ 0`;
//! - [`privacy`]: the noise-covariance constructions: single sensitive
//!   input, weak/strong multi-input, diagonal-restricted, and kernel-based
//!   solutions over finite, gridded, or unbounded sensitive regions;
//! - [`sampling`]: reproducible noise draws via spectral decomposition and a
//!   counter-based RNG;
//! - [`pipeline`]: the owner's train → obfuscate → release workflow and the
//!   serialized released-model artifact;
//! - [`satellite`]: a two-body Kepler generator for the orbit-tracking
//!   application data.
//!
//! # Example
//!
//! Protect the response at `x = 0.5` with a variance floor of `0.5`:
//!
//! ```
//! use privgp_core::gp::{posterior, Dataset};
//! use privgp_core::privacy::single_sensitive_noise;
//! use privgp_core::sampling::{obfuscate, sample_noise};
//! use privgp_core::{GPModel, IntrinsicNoise, KernelSpec};
//!
//! let kernel = KernelSpec::squared_exponential(1.0, 10.0, 1)?;
//! let model = GPModel::new(0.0, kernel, IntrinsicNoise::none())?;
//! let x: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
//! let y: Vec<f64> = x.iter().map(|p| (3.0 * p[0]).sin()).collect();
//!
//! // minimum-trace noise covariance, then the obfuscated responses
//! let noise = single_sensitive_noise(&model, &x, &[0.5], 0.5)?;
//! let w = obfuscate(&y, &sample_noise(&noise.sigma, 42)?)?;
//!
//! // the released model's predictive variance respects the floor
//! let data = Dataset::new(x, w)?;
//! let pred = posterior(&model, &data, Some(&noise.sigma), &[vec![0.5]])?;
//! assert!(pred.covariance.get(0, 0) >= 0.5 - 1e-8);
//! # Ok::<(), privgp_core::Error>(())
//! ```

pub mod error;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod pipeline;
pub mod privacy;
pub mod quadrature;
pub mod sampling;
pub mod satellite;
pub mod sdp;

pub use error::{Error, Result};
pub use gp::{Dataset, FitSummary, GPModel, IntrinsicNoise, PredictiveDistribution};
pub use kernels::{KernelPair, KernelSpec, Validity};
pub use linalg::{Matrix, SpectralDecomposition, SymMatrix};
pub use privacy::{GramG, NoiseCovariance, NoiseProvenance, PrivacySpec, SensitiveRegion};
pub use sampling::{NoiseDraw, NoiseSampler};
pub use sdp::{SdpSolution, SdpStatus, TraceMinProblem};
