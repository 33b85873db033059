//! The three worked examples as reproducible artifact generators. Outputs
//! are plot data (CSV) plus a JSON summary; nothing here draws noise, so
//! every run is byte-identical.

use privgp_core::gp::{posterior, Dataset};
use privgp_core::kernels::{gaussian_pair_valid, validate_pair, KernelSpec};
use privgp_core::linalg::{sym_eigen, SymMatrix};
use privgp_core::privacy::{
    per_point_floor_noise, single_sensitive_noise, strong_noise, weak_noise,
};
use privgp_core::sdp::DEFAULT_MAX_ITER;
use privgp_core::{Error, GPModel, IntrinsicNoise, Result};

use crate::output::{write_json, write_matrix_csv, write_table_csv};
use crate::Cli;

fn nine_point_model() -> Result<(GPModel, Vec<Vec<f64>>)> {
    let kernel = KernelSpec::squared_exponential(1.0, 10.0, 1)?;
    let model = GPModel::new(0.0, kernel, IntrinsicNoise::none())?;
    let points: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
    Ok((model, points))
}

fn variance_curve(
    model: &GPModel,
    x: &[Vec<f64>],
    sigma: Option<&SymMatrix>,
    grid: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let data = Dataset::new(x.to_vec(), vec![0.0; x.len()])?;
    let pred = posterior(model, &data, sigma, grid)?;
    Ok(pred.variances())
}

fn unit_grid(points: usize) -> Vec<Vec<f64>> {
    (0..points)
        .map(|i| vec![i as f64 / (points - 1) as f64])
        .collect()
}

/// Single sensitive input x = 0.5: optimal correlated noise vs the diagonal
/// (independent-noise) method vs no obfuscation.
pub fn example1(cli: &Cli, xi: f64) -> Result<()> {
    let (model, x) = nine_point_model()?;
    let s = vec![0.5];

    let optimal = single_sensitive_noise(&model, &x, &s, xi)?;
    let diagonal = per_point_floor_noise(
        &model,
        &x,
        std::slice::from_ref(&s),
        &[xi],
        true,
        cli.tol,
        DEFAULT_MAX_ITER,
    )?;

    write_matrix_csv(&cli.out.join("sigma_opt.csv"), &optimal.sigma)?;

    // per-training-point noise variances of the two methods
    let rows: Vec<Vec<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, p)| vec![p[0], optimal.sigma.get(i, i), diagonal.sigma.get(i, i)])
        .collect();
    write_table_csv(
        &cli.out.join("noise_variances.csv"),
        &["x", "proposed", "diagonal"],
        &rows,
    )?;

    // predictive-variance curves on a dense grid
    let grid = unit_grid(201);
    let unsecured = variance_curve(&model, &x, None, &grid)?;
    let proposed = variance_curve(&model, &x, Some(&optimal.sigma), &grid)?;
    let diag_curve = variance_curve(&model, &x, Some(&diagonal.sigma), &grid)?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .enumerate()
        .map(|(i, p)| vec![p[0], unsecured[i], proposed[i], diag_curve[i]])
        .collect();
    write_table_csv(
        &cli.out.join("predictive_variance.csv"),
        &["x", "unsecured", "proposed", "diagonal"],
        &rows,
    )?;

    let var_at_s = variance_curve(&model, &x, Some(&optimal.sigma), std::slice::from_ref(&s))?[0];
    let unsecured_at_s = variance_curve(&model, &x, None, std::slice::from_ref(&s))?[0];
    write_json(
        &cli.out.join("summary.json"),
        &serde_json::json!({
            "xi": xi,
            "trace_opt": optimal.trace,
            "trace_diag": diagonal.trace,
            "var_at_s": var_at_s,
            "unsecured_var_at_s": unsecured_at_s,
        }),
    )?;
    Ok(())
}

/// Two sensitive inputs at 0.4 and 0.6: trace of the strong solution across
/// the admissible correlation parameter c, against the weak solution.
pub fn example2(cli: &Cli, c_points: usize) -> Result<()> {
    if c_points < 2 {
        return Err(Error::InvalidInput(
            "need at least two c grid points".into(),
        ));
    }
    let (model, x) = nine_point_model()?;
    let s = vec![vec![0.4], vec![0.6]];
    let weak = weak_noise(&model, &x, &s, &[0.5, 0.5])?;

    // admissible interval (e^{-0.4} - 0.5, 0.5]; sample just inside the
    // open left end
    let c_left = (-0.4f64).exp() - 0.5;
    let c_lo = c_left + 1e-4;
    let c_hi = 0.5;
    let xi_with = |c: f64| SymMatrix::from_rows(&[vec![0.5, c], vec![c, 0.5]]);

    let mut rows = Vec::with_capacity(c_points);
    for k in 0..c_points {
        let c = c_lo + (c_hi - c_lo) * k as f64 / (c_points - 1) as f64;
        let strong = strong_noise(&model, &x, &s, &xi_with(c)?)?;
        rows.push(vec![c, strong.trace, weak.trace]);
    }
    write_table_csv(
        &cli.out.join("traces.csv"),
        &["c", "trace_strong", "trace_weak"],
        &rows,
    )?;

    // variance curves for the weak solution and the strong one at c = 0.45
    let strong45 = strong_noise(&model, &x, &s, &xi_with(0.45)?)?;
    let grid = unit_grid(201);
    let weak_curve = variance_curve(&model, &x, Some(&weak.sigma), &grid)?;
    let strong_curve = variance_curve(&model, &x, Some(&strong45.sigma), &grid)?;
    let curve_rows: Vec<Vec<f64>> = grid
        .iter()
        .enumerate()
        .map(|(i, p)| vec![p[0], weak_curve[i], strong_curve[i]])
        .collect();
    write_table_csv(
        &cli.out.join("predictive_variance.csv"),
        &["x", "weak", "strong_c045"],
        &curve_rows,
    )?;

    // boundary probes: 0.5 is admissible, anything at or below the open
    // left end is not
    let boundary_ok = strong_noise(&model, &x, &s, &xi_with(0.5)?).is_ok();
    let below_left_rejected = matches!(
        strong_noise(&model, &x, &s, &xi_with(0.17)?),
        Err(Error::InvalidXi(_))
    );
    let weak_vars = variance_curve(&model, &x, Some(&weak.sigma), &s)?;
    let strong_vars = variance_curve(&model, &x, Some(&strong45.sigma), &s)?;
    let min_eig_gap = sym_eigen(&strong45.sigma.sub(&weak.sigma))?.min_eigenvalue();
    write_json(
        &cli.out.join("summary.json"),
        &serde_json::json!({
            "c_interval": [c_left, 0.5],
            "trace_weak": weak.trace,
            "boundary_c_0_5_accepted": boundary_ok,
            "c_0_17_rejected": below_left_rejected,
            "weak_variances_at_s": weak_vars,
            "strong_c045_variances_at_s": strong_vars,
            "min_eigenvalue_strong_minus_weak": min_eig_gap,
        }),
    )?;
    Ok(())
}

/// Validity region {0 ≤ c < 1, c^{2/d}·θ₀ ≤ θ ≤ θ₀} for d = 1, 2, 3:
/// boundary samples plus a pass/fail probe table.
pub fn example3(cli: &Cli, theta0: f64) -> Result<()> {
    if !theta0.is_finite() || theta0 <= 0.0 {
        return Err(Error::InvalidInput("theta0 must be positive".into()));
    }
    let mut boundary_rows = Vec::new();
    let mut probe_rows = Vec::new();
    let mut disagreements = 0usize;
    for d in [1usize, 2, 3] {
        for i in 0..61 {
            let c = i as f64 / 60.0;
            if c < 1.0 {
                boundary_rows.push(vec![
                    d as f64,
                    c,
                    c.powf(2.0 / d as f64) * theta0, // lower θ boundary
                    theta0,                          // upper θ boundary
                ]);
            }
            // probe grid over θ including points outside the region
            for j in 0..31 {
                let theta = theta0 * (0.04 + 1.16 * j as f64 / 30.0);
                let region = gaussian_pair_valid(theta0, c, theta, d);
                let k = KernelSpec::squared_exponential(1.0, theta0, d)?;
                let h = KernelSpec::squared_exponential(c, theta, d)?;
                let checked = validate_pair(&k, &h).is_valid();
                if region != checked {
                    disagreements += 1;
                }
                probe_rows.push(vec![d as f64, c, theta, if checked { 1.0 } else { 0.0 }]);
            }
        }
    }
    write_table_csv(
        &cli.out.join("validity_boundary.csv"),
        &["d", "c", "theta_lower", "theta_upper"],
        &boundary_rows,
    )?;
    write_table_csv(
        &cli.out.join("validity_probes.csv"),
        &["d", "c", "theta", "valid"],
        &probe_rows,
    )?;
    write_json(
        &cli.out.join("summary.json"),
        &serde_json::json!({
            "theta0": theta0,
            "probes": probe_rows.len(),
            "region_vs_validate_pair_disagreements": disagreements,
            "c_equal_one_rejected": !validate_pair(
                &KernelSpec::squared_exponential(1.0, theta0, 1)?,
                &KernelSpec::squared_exponential(1.0, theta0, 1)?,
            )
            .is_valid(),
        }),
    )?;
    Ok(())
}
