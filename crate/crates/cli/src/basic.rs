//! Thin wrappers over the library: fit, solve-noise, obfuscate, predict,
//! and the config-driven pipeline.

use std::path::Path;

use privgp_core::gp::{fit_constant_mean_and_variance, Dataset, GPModel};
use privgp_core::kernels::KernelSpec;
use privgp_core::linalg::SymMatrix;
use privgp_core::pipeline::{self, PipelineConfig, ReleasedModel};
use privgp_core::privacy::{self, NoiseCovariance, PrivacySpec};
use privgp_core::sampling;
use privgp_core::{Error, Result};

use crate::output::{read_json, read_points_csv, write_json, write_matrix_csv, write_table_csv};
use crate::{Cli, Format};

pub fn fit(
    cli: &Cli,
    data_path: &Path,
    correlation_path: &Path,
    noise_shape_path: Option<&Path>,
) -> Result<()> {
    let data = Dataset::read_csv(data_path)?;
    let correlation: KernelSpec = read_json(correlation_path)?;
    correlation.validate()?;
    let shape: Option<SymMatrix> = noise_shape_path.map(read_json).transpose()?;
    let (model, summary) =
        fit_constant_mean_and_variance(data.points(), data.values(), &correlation, shape.as_ref())?;
    model.save_json(cli.out.join("model.json"))?;
    write_json(&cli.out.join("fit_summary.json"), &summary)?;
    log::info!(
        "fitted mean {:.6}, variance {:.6} over {} points",
        summary.mean,
        summary.variance,
        data.len()
    );
    Ok(())
}

pub fn solve_noise(
    cli: &Cli,
    model_path: &Path,
    data_path: &Path,
    privacy_path: &Path,
    diagonal: bool,
) -> Result<()> {
    let model = GPModel::load_json(model_path)?;
    let data = Dataset::read_csv(data_path)?;
    let spec: PrivacySpec = read_json(privacy_path)?;
    let noise: NoiseCovariance = if diagonal {
        match &spec {
            PrivacySpec::Single { s, xi } => privacy::per_point_floor_noise(
                &model,
                data.points(),
                std::slice::from_ref(s),
                &[*xi],
                true,
                cli.tol,
                privgp_core::sdp::DEFAULT_MAX_ITER,
            )?,
            PrivacySpec::Weak { s_points, xi } => privacy::per_point_floor_noise(
                &model,
                data.points(),
                s_points,
                xi,
                true,
                cli.tol,
                privgp_core::sdp::DEFAULT_MAX_ITER,
            )?,
            _ => {
                return Err(Error::InvalidInput(
                    "--diagonal applies only to single or weak privacy specs".into(),
                ))
            }
        }
    } else {
        privacy::noise_for_spec(&model, data.points(), &spec)?
    };
    for warning in &noise.warnings {
        log::warn!("{warning}");
    }
    write_json(&cli.out.join("sigma.json"), &noise)?;
    if cli.format == Format::Csv {
        write_matrix_csv(&cli.out.join("sigma.csv"), &noise.sigma)?;
    }
    Ok(())
}

pub fn obfuscate(cli: &Cli, data_path: &Path, sigma_path: &Path) -> Result<()> {
    let data = Dataset::read_csv(data_path)?;
    let noise: NoiseCovariance = read_json(sigma_path)?;
    let draw = sampling::sample_noise(&noise.sigma, cli.seed)?;
    let w = sampling::obfuscate(data.values(), &draw)?;
    let obfuscated = data.with_values(w)?;
    obfuscated.write_csv(cli.out.join("obfuscated.csv"))?;
    Ok(())
}

pub fn predict(cli: &Cli, released_path: &Path, points_path: &Path) -> Result<()> {
    let released: ReleasedModel = pipeline::load(released_path)?;
    let points = read_points_csv(points_path)?;
    let pred = pipeline::predict(&released, &points)?;
    match cli.format {
        Format::Csv => {
            let d = points.first().map_or(0, Vec::len);
            let mut header: Vec<String> = (1..=d).map(|k| format!("x_{k}")).collect();
            header.extend(["mean".into(), "variance".into(), "stddev".into()]);
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<f64>> = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut row = p.clone();
                    let var = pred.covariance.get(i, i);
                    row.extend([pred.mean[i], var, var.max(0.0).sqrt()]);
                    row
                })
                .collect();
            write_table_csv(&cli.out.join("predictions.csv"), &header_refs, &rows)?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "points": points,
                "mean": pred.mean,
                "variance": pred.variances(),
            });
            write_json(&cli.out.join("predictions.json"), &doc)?;
        }
    }
    Ok(())
}

pub fn pipeline(cli: &Cli, config_path: &Path) -> Result<()> {
    let config = PipelineConfig::load_json(config_path)?;
    let released = pipeline::run(&config)?;
    let artifact_path = config
        .output
        .clone()
        .unwrap_or_else(|| cli.out.join("released.json"));
    pipeline::save(&released, &artifact_path)?;
    let report = pipeline::verify(&released)?;
    write_json(&cli.out.join("verification_report.json"), &report)?;
    log::info!(
        "released model written to {} (noise trace {:.6})",
        artifact_path.display(),
        released.sigma.trace
    );
    Ok(())
}
