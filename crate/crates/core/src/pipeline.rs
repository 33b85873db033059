//! The owner's workflow (train, obfuscate, release) and the serialized
//! released-model artifact users consume.
//!
//! A [`ReleasedModel`] holds everything the owner discloses: the inputs `X`,
//! the obfuscated responses `W`, the GP model (mean, kernel, `V`), the noise
//! covariance `Σ`, and (unless redacted) the privacy specification. That is
//! enough to evaluate the released predictor and its variance, and by design
//! it is *safe* to disclose: the predictor built from these quantities is
//! already the best possible, so the variance floors hold for any user.
//!
//! Artifacts are single JSON documents. Floating-point fields round-trip
//! bit-exactly because the writer emits shortest-round-trip decimals and the
//! reader parses them back to the identical `f64`. A checksum over the
//! canonical payload serialization and a format version are embedded;
//! loading re-verifies both, then re-checks the privacy floors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{posterior, Dataset, GPModel, IntrinsicNoise, PredictiveDistribution};
use crate::kernels::KernelSpec;
use crate::linalg::sym_eigen;
use crate::privacy::{noise_for_spec, probe_points, NoiseCovariance, PrivacySpec};
use crate::sampling::{obfuscate, sample_noise};

/// Current artifact format version.
pub const FORMAT_VERSION: u32 = 1;

/// Floor slack tolerated during verification, in variance units.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

/// The disclosed artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleasedModel {
    pub format_version: u32,
    /// Training inputs `X`.
    pub inputs: Vec<Vec<f64>>,
    /// Obfuscated responses `W = Y + Z`.
    pub obfuscated_values: Vec<f64>,
    pub model: GPModel,
    pub sigma: NoiseCovariance,
    /// Disclosed privacy specification; `None` when the owner redacts it.
    /// `Σ` itself always ships because the released predictor needs it.
    pub privacy_spec: Option<PrivacySpec>,
    /// Seed used for the noise draw (disclosure is harmless: the draw is
    /// already public through `W`).
    pub seed: u64,
}

/// How the pipeline obtains model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// Maximum-likelihood fit of a constant mean and signal variance on a
    /// fixed unit-amplitude correlation.
    Fit { correlation: KernelSpec },
    /// Fully specified model parameters.
    Fixed { mean: f64, kernel: KernelSpec },
}

/// Everything `run` needs, deserializable from a config JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Path to the dataset CSV (columns `x_1..x_d,y`).
    pub dataset: std::path::PathBuf,
    pub model: ModelSource,
    /// Intrinsic noise `V`; defaults to zero. Under the `fit` model source
    /// this is a noise *shape* relative to the fitted signal variance (the
    /// trained model carries `V = σ̂²·shape`).
    #[serde(default)]
    pub intrinsic_noise: Option<IntrinsicNoise>,
    pub privacy: PrivacySpec,
    pub seed: u64,
    /// Where to write the released artifact; callers may override.
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
    /// Strip the privacy spec from the artifact.
    #[serde(default)]
    pub redact_privacy_spec: bool,
}

impl PipelineConfig {
    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Per-probe-point verification record.
#[derive(Debug, Clone, Serialize)]
pub struct FloorCheck {
    pub point: Vec<f64>,
    pub variance: f64,
    pub floor: f64,
    pub margin: f64,
}

/// Result of re-checking a released model against its privacy spec.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<FloorCheck>,
    /// Minimum eigenvalue of `Cov[f(S)|W] − Ξ` for the matrix-floor variants
    /// (strong and kernel-based); `None` for scalar-floor variants.
    pub matrix_floor_min_eigenvalue: Option<f64>,
    pub worst_margin: f64,
}

/// Obfuscation and reconstruction for an already-trained model: compute Σ
/// for the privacy spec, draw the noise with the seed, and assemble the
/// verified artifact. This is the entry point for callers that train (or
/// construct) the model themselves; the privacy kernel of a kernel-based
/// spec often references the fitted kernel, which only exists after
/// training.
pub fn run_with_model(
    model: GPModel,
    data: &Dataset,
    privacy: &PrivacySpec,
    seed: u64,
    redact_privacy_spec: bool,
) -> Result<ReleasedModel> {
    let sigma =
        noise_for_spec(&model, data.points(), privacy).map_err(|e| e.in_stage("obfuscation"))?;
    let draw = sample_noise(&sigma.sigma, seed).map_err(|e| e.in_stage("obfuscation"))?;
    let w = obfuscate(data.values(), &draw).map_err(|e| e.in_stage("obfuscation"))?;

    let released = ReleasedModel {
        format_version: FORMAT_VERSION,
        inputs: data.points().to_vec(),
        obfuscated_values: w,
        model,
        sigma,
        privacy_spec: if redact_privacy_spec {
            None
        } else {
            Some(privacy.clone())
        },
        seed,
    };
    verify(&released).map_err(|e| e.in_stage("reconstruction"))?;
    Ok(released)
}

/// Run the three-step pipeline: train (or accept) the model, compute Σ and
/// obfuscate with the seed, then assemble and verify the released artifact.
/// Stage failures carry their stage name.
pub fn run(config: &PipelineConfig) -> Result<ReleasedModel> {
    // training
    let data = Dataset::read_csv(&config.dataset).map_err(|e| e.in_stage("training"))?;
    let model = match &config.model {
        ModelSource::Fixed { mean, kernel } => {
            let noise = config
                .intrinsic_noise
                .clone()
                .unwrap_or_else(IntrinsicNoise::none);
            GPModel::new(*mean, kernel.clone(), noise).map_err(|e| e.in_stage("training"))?
        }
        ModelSource::Fit { correlation } => {
            let shape = match &config.intrinsic_noise {
                None => None,
                Some(IntrinsicNoise::Scalar(s)) if *s == 0.0 => None,
                Some(IntrinsicNoise::Matrix(m)) => Some(m.clone()),
                Some(other) => Some(
                    other
                        .materialize(data.len())
                        .map_err(|e| e.in_stage("training"))?,
                ),
            };
            let (model, summary) = crate::gp::fit_constant_mean_and_variance(
                data.points(),
                data.values(),
                correlation,
                shape.as_ref(),
            )
            .map_err(|e| e.in_stage("training"))?;
            if summary.degenerate {
                return Err(Error::InvalidInput(
                    "fit produced a zero-variance model (all responses equal)".into(),
                )
                .in_stage("training"));
            }
            model
        }
    };
    run_with_model(
        model,
        &data,
        &config.privacy,
        config.seed,
        config.redact_privacy_spec,
    )
}

/// Released-model prediction: evaluates the privacy-aware posterior from the
/// disclosed `(X, W, model, Σ)`.
pub fn predict(released: &ReleasedModel, x_star: &[Vec<f64>]) -> Result<PredictiveDistribution> {
    let data = Dataset::new(released.inputs.clone(), released.obfuscated_values.clone())?;
    posterior(&released.model, &data, Some(&released.sigma.sigma), x_star)
}

/// Variance floor the privacy spec implies at each probe point.
fn floor_at(spec: &PrivacySpec, index: usize, point: &[f64]) -> Result<f64> {
    Ok(match spec {
        PrivacySpec::Single { xi, .. } => *xi,
        PrivacySpec::Weak { xi, .. } => xi[index],
        PrivacySpec::Strong { xi_matrix, .. } => xi_matrix.get(index, index),
        PrivacySpec::KernelBased { privacy_kernel, .. } => privacy_kernel.eval(point, point)?,
    })
}

/// Re-check the artifact's privacy floors from its own disclosed quantities.
///
/// Scalar-floor variants check the predictive variance at every sensitive
/// point; matrix-floor variants (strong, kernel-based) additionally check
/// the matrix inequality `Cov[f(S)|W] ⪰ Ξ` on the probe set. For the
/// `WholeSpace` region the training inputs serve as the probe set. A
/// redacted artifact (no spec) has nothing to verify and passes vacuously.
pub fn verify(released: &ReleasedModel) -> Result<VerificationReport> {
    if released.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: released.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let spec = match &released.privacy_spec {
        Some(spec) => spec,
        None => {
            return Ok(VerificationReport {
                checks: Vec::new(),
                matrix_floor_min_eigenvalue: None,
                worst_margin: f64::INFINITY,
            })
        }
    };
    let probes = probe_points(spec, &released.inputs)?;
    let data = Dataset::new(released.inputs.clone(), released.obfuscated_values.clone())?;
    let pred = posterior(&released.model, &data, Some(&released.sigma.sigma), &probes)?;

    let mut checks = Vec::with_capacity(probes.len());
    let mut worst = f64::INFINITY;
    for (index, point) in probes.iter().enumerate() {
        let variance = pred.covariance.get(index, index);
        let floor = floor_at(spec, index, point)?;
        let margin = variance - floor;
        worst = worst.min(margin);
        checks.push(FloorCheck {
            point: point.clone(),
            variance,
            floor,
            margin,
        });
    }

    let matrix_floor_min_eigenvalue = match spec {
        PrivacySpec::Strong { xi_matrix, .. } => {
            Some(sym_eigen(&pred.covariance.sub(xi_matrix))?.min_eigenvalue())
        }
        PrivacySpec::KernelBased { privacy_kernel, .. } => {
            let h_probe = privacy_kernel.gram_sym(&probes)?;
            Some(sym_eigen(&pred.covariance.sub(&h_probe))?.min_eigenvalue())
        }
        _ => None,
    };

    if worst < -VERIFY_TOLERANCE {
        return Err(Error::VerificationFailed(format!(
            "variance floor violated by {:.3e} at a sensitive point",
            -worst
        )));
    }
    if let Some(min_eig) = matrix_floor_min_eigenvalue {
        if min_eig < -VERIFY_TOLERANCE {
            return Err(Error::VerificationFailed(format!(
                "matrix floor Cov[f(S)|W] ⪰ Ξ violated: min eigenvalue {min_eig:.3e}"
            )));
        }
    }
    Ok(VerificationReport {
        checks,
        matrix_floor_min_eigenvalue,
        worst_margin: worst,
    })
}

// --- artifact file I/O ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    payload: ReleasedModel,
    /// FNV-1a 64 over the canonical payload JSON, hex-encoded.
    checksum: String,
}

fn payload_checksum(payload: &ReleasedModel) -> Result<String> {
    let canonical = serde_json::to_string(payload)?;
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x1000_0000_01b3;
    let mut hash = OFFSET;
    for byte in canonical.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(PRIME);
    }
    Ok(format!("{hash:016x}"))
}

/// Write the artifact (verifying its floors first).
pub fn save(released: &ReleasedModel, path: impl AsRef<Path>) -> Result<()> {
    verify(released)?;
    let file = ArtifactFile {
        checksum: payload_checksum(released)?,
        payload: released.clone(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Read an artifact; fails on version mismatch, checksum mismatch, or a
/// violated privacy floor. Verification on load is mandatory so a tampered
/// artifact cannot silently break its own privacy contract.
pub fn load(path: impl AsRef<Path>) -> Result<ReleasedModel> {
    let file: ArtifactFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if file.payload.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: file.payload.format_version,
            expected: FORMAT_VERSION,
        });
    }
    if payload_checksum(&file.payload)? != file.checksum {
        return Err(Error::ChecksumMismatch);
    }
    verify(&file.payload)?;
    Ok(file.payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::linalg::SymMatrix;

    fn example1_config(dir: &Path, xi: f64, seed: u64) -> PipelineConfig {
        let points: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
        let values: Vec<f64> = points.iter().map(|p| (3.0 * p[0]).sin()).collect();
        let dataset_path = dir.join("data.csv");
        Dataset::new(points, values)
            .unwrap()
            .write_csv(&dataset_path)
            .unwrap();
        PipelineConfig {
            dataset: dataset_path,
            model: ModelSource::Fixed {
                mean: 0.0,
                kernel: KernelSpec::squared_exponential(1.0, 10.0, 1).unwrap(),
            },
            intrinsic_noise: None,
            privacy: PrivacySpec::Single { s: vec![0.5], xi },
            seed,
            output: None,
            redact_privacy_spec: false,
        }
    }

    #[test]
    fn slack_floor_means_no_obfuscation() {
        let dir = tempfile::tempdir().unwrap();
        // sensitive point far outside the data: floor already met, Σ = 0
        let mut config = example1_config(dir.path(), 0.5, 7);
        config.privacy = PrivacySpec::Single {
            s: vec![50.0],
            xi: 0.5,
        };
        let released = run(&config).unwrap();
        assert!(released.sigma.sigma.max_abs() <= 1e-12);
        let data = Dataset::read_csv(&config.dataset).unwrap();
        assert_eq!(released.obfuscated_values, data.values());
    }

    #[test]
    fn end_to_end_meets_floor() {
        let dir = tempfile::tempdir().unwrap();
        let config = example1_config(dir.path(), 0.5, 42);
        let released = run(&config).unwrap();
        let pred = predict(&released, &[vec![0.5]]).unwrap();
        assert!(pred.covariance.get(0, 0) >= 0.5 - 1e-6);
        let report = verify(&released).unwrap();
        assert!(report.worst_margin >= -VERIFY_TOLERANCE);
        assert_eq!(report.checks.len(), 1);
    }

    #[test]
    fn save_load_round_trip_preserves_predictions_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let config = example1_config(dir.path(), 0.5, 42);
        let released = run(&config).unwrap();
        let path = dir.path().join("released.json");
        save(&released, &path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded, released);
        let grid: Vec<Vec<f64>> = (0..=20).map(|i| vec![i as f64 / 20.0]).collect();
        let before = predict(&released, &grid).unwrap();
        let after = predict(&loaded, &grid).unwrap();
        assert_eq!(before.mean, after.mean);
        assert_eq!(before.covariance, after.covariance);
    }

    #[test]
    fn tampered_artifact_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let config = example1_config(dir.path(), 0.5, 42);
        let released = run(&config).unwrap();
        let path = dir.path().join("released.json");
        save(&released, &path).unwrap();
        // perturb one obfuscated value without touching the stored checksum
        let mut file: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        file["payload"]["obfuscated_values"][0] = serde_json::json!(9.9);
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert!(matches!(load(&path), Err(Error::ChecksumMismatch)));
    }

    #[test]
    fn version_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let config = example1_config(dir.path(), 0.5, 42);
        let mut released = run(&config).unwrap();
        released.format_version = 2;
        assert!(matches!(
            verify(&released),
            Err(Error::VersionMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn floor_violation_rejected_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let config = example1_config(dir.path(), 0.5, 42);
        let mut released = run(&config).unwrap();
        // strip the noise: the floor at 0.5 no longer holds
        released.sigma.sigma = SymMatrix::zeros(9);
        assert!(matches!(
            verify(&released),
            Err(Error::VerificationFailed(_))
        ));
        // and save refuses to write it in the first place
        assert!(save(&released, dir.path().join("bad.json")).is_err());
    }

    #[test]
    fn redacted_artifact_loads_without_floor_checks() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = example1_config(dir.path(), 0.5, 42);
        config.redact_privacy_spec = true;
        let released = run(&config).unwrap();
        assert!(released.privacy_spec.is_none());
        let path = dir.path().join("redacted.json");
        save(&released, &path).unwrap();
        let loaded = load(&path).unwrap();
        let report = verify(&loaded).unwrap();
        assert!(report.checks.is_empty());
    }

    #[test]
    fn strong_spec_verifies_matrix_floor() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = example1_config(dir.path(), 0.5, 42);
        config.privacy = PrivacySpec::Strong {
            s_points: vec![vec![0.4], vec![0.6]],
            xi_matrix: SymMatrix::from_rows(&[vec![0.5, 0.45], vec![0.45, 0.5]]).unwrap(),
        };
        let released = run(&config).unwrap();
        let report = verify(&released).unwrap();
        let min_eig = report.matrix_floor_min_eigenvalue.unwrap();
        assert!(
            min_eig >= -VERIFY_TOLERANCE,
            "matrix floor margin {min_eig}"
        );
        assert_eq!(report.checks.len(), 2);
        // degrading Σ breaks the matrix floor and verification catches it
        let mut broken = released;
        broken.sigma.sigma = broken.sigma.sigma.scaled(0.5);
        assert!(matches!(verify(&broken), Err(Error::VerificationFailed(_))));
    }

    #[test]
    fn stage_labels_propagate() {
        let config = PipelineConfig {
            dataset: "/nonexistent/data.csv".into(),
            model: ModelSource::Fixed {
                mean: 0.0,
                kernel: KernelSpec::squared_exponential(1.0, 10.0, 1).unwrap(),
            },
            intrinsic_noise: None,
            privacy: PrivacySpec::Single {
                s: vec![0.5],
                xi: 0.5,
            },
            seed: 0,
            output: None,
            redact_privacy_spec: false,
        };
        match run(&config) {
            Err(Error::Stage { stage, .. }) => assert_eq!(stage, "training"),
            other => panic!("expected a training-stage error, got {other:?}"),
        }
    }
}
