//! Reproducible synthetic-noise draws.
//!
//! `Z ~ N(0, Σ)` is sampled through the spectral route: decompose
//! `Σ = Oᵀ diag(λ) O`, draw independent standard normals `ωᵢ` in
//! eigenvalue-descending order, form `U = (√λ₁⁺ ω₁, …, √λₙ⁺ ωₙ)ᵀ`, and set
//! `Z = OᵀU`. Directions with `λᵢ ≤ 0` contribute exactly zero, but their
//! `ωᵢ` is still consumed so a seed maps to the same draw no matter how many
//! eigenvalues get clipped.
//!
//! The generator is SplitMix64, a counter-based 64-bit generator that is
//! trivial to reproduce in any language, and normal variates come from the
//! Box-Muller transform on its uniform stream. Bit-exact equality of draws is
//! guaranteed for the same (Σ, seed) within this implementation.

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymMatrix};

/// SplitMix64: counter-based, splittable, trivially portable.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `(0, 1]` from the top 53 bits (never returns 0, so it is
    /// safe to take a logarithm).
    pub fn next_uniform(&mut self) -> f64 {
        let mantissa = self.next_u64() >> 11;
        (mantissa + 1) as f64 * (1.0 / 9_007_199_254_740_992.0) // 2^-53
    }

    /// Two independent standard normals via Box-Muller.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        (radius * angle.cos(), radius * angle.sin())
    }

    /// `count` standard normals, consuming whole Box-Muller pairs.
    pub fn standard_normals(&mut self, count: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let (a, b) = self.next_normal_pair();
            out.push(a);
            if out.len() < count {
                out.push(b);
            }
        }
        out
    }
}

/// FNV-1a 64-bit hash of the matrix order and entry bytes; identifies which
/// Σ a draw was taken from.
pub fn sigma_fingerprint(sigma: &SymMatrix) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x1000_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |byte: u8| {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(PRIME);
    };
    for byte in (sigma.order() as u64).to_le_bytes() {
        eat(byte);
    }
    for value in sigma.data() {
        for byte in value.to_le_bytes() {
            eat(byte);
        }
    }
    hash
}

/// A reproducible draw of the synthetic noise vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub z: Vec<f64>,
    pub seed: u64,
    pub sigma_fingerprint: u64,
}

/// Holds the spectral decomposition of one Σ so repeated draws (different
/// seeds) skip the eigendecomposition. `draw(seed)` is bit-identical to
/// `sample_noise(&sigma, seed)`.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    sqrt_eigenvalues: Vec<f64>,
    basis: crate::linalg::Matrix,
    fingerprint: u64,
}

impl NoiseSampler {
    pub fn new(sigma: &SymMatrix) -> Result<Self> {
        let dec = sym_eigen(sigma)?;
        let scale = sigma.max_abs().max(f64::MIN_POSITIVE);
        if dec.min_eigenvalue() < -1e-6 * scale {
            return Err(Error::NotPsd(format!(
                "noise covariance has eigenvalue {:.3e} (scale {:.3e})",
                dec.min_eigenvalue(),
                scale
            )));
        }
        Ok(NoiseSampler {
            sqrt_eigenvalues: dec.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect(),
            basis: dec.basis,
            fingerprint: sigma_fingerprint(sigma),
        })
    }

    pub fn order(&self) -> usize {
        self.sqrt_eigenvalues.len()
    }

    pub fn draw(&self, seed: u64) -> NoiseDraw {
        let n = self.order();
        let mut rng = SplitMix64::new(seed);
        let omegas = rng.standard_normals(n);
        // U_i = √λᵢ⁺ ωᵢ in eigenvalue-descending order; clipped modes give
        // exact zero but still consume their ωᵢ
        let u: Vec<f64> = self
            .sqrt_eigenvalues
            .iter()
            .zip(&omegas)
            .map(|(&s, &w)| s * w)
            .collect();
        // Z = Oᵀ U with basis rows holding the eigenvectors
        let z: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| self.basis[(i, j)] * u[i]).sum())
            .collect();
        NoiseDraw {
            z,
            seed,
            sigma_fingerprint: self.fingerprint,
        }
    }
}

/// Draw `Z ~ N(0, Σ)` deterministically from the seed.
pub fn sample_noise(sigma: &SymMatrix, seed: u64) -> Result<NoiseDraw> {
    Ok(NoiseSampler::new(sigma)?.draw(seed))
}

/// Obfuscated responses `W = Y + Z`.
pub fn obfuscate(y: &[f64], draw: &NoiseDraw) -> Result<Vec<f64>> {
    if y.len() != draw.z.len() {
        return Err(Error::DimensionMismatch(format!(
            "responses have length {}, draw has length {}",
            y.len(),
            draw.z.len()
        )));
    }
    Ok(y.iter().zip(&draw.z).map(|(a, b)| a + b).collect())
}
