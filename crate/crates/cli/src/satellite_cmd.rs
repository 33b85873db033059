//! Satellite-trajectory application: generate the Kepler dataset, fit the
//! GP, obfuscate over the private segments for each privacy scale α, and
//! emit predictive-band plot data plus a width report.

use std::path::Path;

use privgp_core::gp::{fit_constant_mean_and_variance, posterior};
use privgp_core::kernels::KernelSpec;
use privgp_core::pipeline::{self, run_with_model};
use privgp_core::privacy::{PrivacySpec, SensitiveRegion};
use privgp_core::satellite::{generate, segment_grid, OrbitParams};
use privgp_core::{Error, Result};

use crate::output::{read_json, write_json, write_table_csv};
use crate::Cli;

const SAMPLES: usize = 61;
const DOMAIN: (f64, f64) = (0.0, 3.0);
const CORRELATION_THETA: f64 = 200.0;
const BAND_GRID: usize = 601;

/// Transition buffer in kernel lengthscales used to classify probe points:
/// the variance floor at a segment edge necessarily bleeds outward over a
/// few lengthscales, so "outside" starts past the buffer.
const BUFFER_LENGTHSCALES: f64 = 4.0;

pub fn satellite(
    cli: &Cli,
    config: Option<&Path>,
    points_per_segment: usize,
    alphas: &[f64],
) -> Result<()> {
    if points_per_segment == 0 {
        return Err(Error::InvalidInput(
            "points-per-segment must be >= 1".into(),
        ));
    }
    let params: OrbitParams = match config {
        Some(path) => read_json(path)?,
        None => OrbitParams::default(),
    };
    let data = generate(&params, SAMPLES, DOMAIN)?;
    data.write_csv(cli.out.join("dataset.csv"))?;
    write_json(
        &cli.out.join("segments.json"),
        &serde_json::json!({
            "orbit": params,
            "domain": DOMAIN,
            "samples": SAMPLES,
            "points_per_segment": points_per_segment,
        }),
    )?;

    let correlation = KernelSpec::squared_exponential(1.0, CORRELATION_THETA, 1)?;
    let (model, summary) =
        fit_constant_mean_and_variance(data.points(), data.values(), &correlation, None)?;
    write_json(&cli.out.join("fit_summary.json"), &summary)?;

    let grid: Vec<Vec<f64>> = (0..BAND_GRID)
        .map(|i| vec![DOMAIN.0 + (DOMAIN.1 - DOMAIN.0) * i as f64 / (BAND_GRID - 1) as f64])
        .collect();
    let unsecured = posterior(&model, &data, None, &grid)?;
    let sensitive = segment_grid(&params.private_segments, points_per_segment);
    let lengthscale = (2.0 * CORRELATION_THETA).sqrt().recip();
    let buffer = BUFFER_LENGTHSCALES * lengthscale;

    let mut reports = Vec::new();
    for &alpha in alphas {
        let privacy_kernel = KernelSpec::scaled_copy(model.kernel.clone(), alpha)?;
        let spec = PrivacySpec::KernelBased {
            privacy_kernel,
            region: SensitiveRegion::FinitePoints {
                points: sensitive.clone(),
            },
        };
        let released = run_with_model(model.clone(), &data, &spec, cli.seed, false)?;
        let tag = format!("alpha{alpha}");
        pipeline::save(&released, cli.out.join(format!("released_{tag}.json")))?;

        // obfuscated data points (Fig-style blue dots)
        let rows: Vec<Vec<f64>> = released
            .inputs
            .iter()
            .zip(&released.obfuscated_values)
            .map(|(p, w)| vec![p[0], *w])
            .collect();
        write_table_csv(
            &cli.out.join(format!("obfuscated_{tag}.csv")),
            &["t", "w"],
            &rows,
        )?;

        // predictive mean and ±2σ band on the dense grid
        let released_pred = pipeline::predict(&released, &grid)?;
        let mut band_rows = Vec::with_capacity(grid.len());
        let mut width_inside: Vec<f64> = Vec::new();
        let mut width_outside: Vec<f64> = Vec::new();
        let mut max_outside_sd_gap: f64 = 0.0;
        for (i, p) in grid.iter().enumerate() {
            let t = p[0];
            let sd = released_pred.covariance.get(i, i).max(0.0).sqrt();
            let sd_unsecured = unsecured.covariance.get(i, i).max(0.0).sqrt();
            let mean = released_pred.mean[i];
            band_rows.push(vec![
                t,
                mean,
                sd,
                mean - 2.0 * sd,
                mean + 2.0 * sd,
                sd_unsecured,
            ]);
            let inside = params
                .private_segments
                .iter()
                .any(|&(lo, hi)| t >= lo && t <= hi);
            let in_buffer = params
                .private_segments
                .iter()
                .any(|&(lo, hi)| t >= lo - buffer && t <= hi + buffer);
            if inside {
                width_inside.push(4.0 * sd); // full ±2σ band width
            } else if !in_buffer {
                width_outside.push(4.0 * sd);
                max_outside_sd_gap = max_outside_sd_gap.max((sd - sd_unsecured).abs());
            }
        }
        write_table_csv(
            &cli.out.join(format!("band_{tag}.csv")),
            &["t", "mean", "sd", "lo_2sigma", "hi_2sigma", "unsecured_sd"],
            &band_rows,
        )?;

        let floor = alpha * summary.variance;
        let verification = pipeline::verify(&released)?;
        let mean_width = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        reports.push(serde_json::json!({
            "alpha": alpha,
            "noise_trace": released.sigma.trace,
            "variance_floor": floor,
            "worst_floor_margin": verification.worst_margin,
            "mean_band_width_inside": mean_width(&width_inside),
            "mean_band_width_outside": mean_width(&width_outside),
            "max_outside_sd_change": max_outside_sd_gap,
            "prior_sd": summary.variance.sqrt(),
            "warnings": released.sigma.warnings,
        }));
    }
    write_json(
        &cli.out.join("report.json"),
        &serde_json::json!({
            "fit": summary,
            "buffer_lengthscales": BUFFER_LENGTHSCALES,
            "per_alpha": reports,
        }),
    )?;
    Ok(())
}
