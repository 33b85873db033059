//! GP regression under correlated additive noise: posterior mean and
//! covariance, log marginal likelihood, and closed-form maximum-likelihood
//! estimation of a constant mean and signal variance.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{cholesky, sym_eigen, CholeskyFactor, SymMatrix};

/// Training data: `n` input points in `ℝ^d` with scalar responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "dataset needs matching non-empty X and Y, got {} points and {} values",
                points.len(),
                values.len()
            )));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch(
                    "dataset points have inconsistent dimensions".into(),
                ));
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput(
                    "dataset point has non-finite coordinate".into(),
                ));
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("dataset value is non-finite".into()));
        }
        Ok(Dataset { points, values })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same inputs with replaced response values (used for obfuscated data).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.points.clone(), values)
    }

    /// Read from CSV with header `x_1,...,x_d,y`.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let d = headers.len().saturating_sub(1);
        if d == 0 || headers.get(d) != Some("y") {
            return Err(Error::InvalidInput(
                "dataset CSV must have columns x_1,...,x_d,y".into(),
            ));
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != d + 1 {
                return Err(Error::InvalidInput(
                    "dataset CSV row has wrong arity".into(),
                ));
            }
            let mut p = Vec::with_capacity(d);
            for k in 0..d {
                p.push(parse_float(record.get(k).unwrap_or(""))?);
            }
            points.push(p);
            values.push(parse_float(record.get(d).unwrap_or(""))?);
        }
        Dataset::new(points, values)
    }

    /// Write as CSV with header `x_1,...,x_d,y`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let d = self.dim();
        let mut header: Vec<String> = (1..=d).map(|k| format!("x_{k}")).collect();
        header.push("y".into());
        writer.write_record(&header)?;
        for (p, y) in self.points.iter().zip(&self.values) {
            let mut row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
            row.push(format!("{y}"));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn parse_float(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("cannot parse '{text}' as a number")))
}

/// Intrinsic noise covariance `V`, accepted as a scalar `ς²·I`, a diagonal,
/// or a full symmetric PSD matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntrinsicNoise {
    Scalar(f64),
    Diagonal(Vec<f64>),
    Matrix(SymMatrix),
}

impl IntrinsicNoise {
    pub fn none() -> Self {
        IntrinsicNoise::Scalar(0.0)
    }

    /// Materialize as an `n × n` matrix, validating PSD-ness.
    pub fn materialize(&self, n: usize) -> Result<SymMatrix> {
        match self {
            IntrinsicNoise::Scalar(s) => {
                if !s.is_finite() || *s < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "scalar noise variance must be >= 0, got {s}"
                    )));
                }
                Ok(SymMatrix::scaled_identity(n, *s))
            }
            IntrinsicNoise::Diagonal(d) => {
                if d.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "diagonal noise has length {}, expected {n}",
                        d.len()
                    )));
                }
                if d.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidInput(
                        "diagonal noise variances must be finite and >= 0".into(),
                    ));
                }
                Ok(SymMatrix::from_diag(d))
            }
            IntrinsicNoise::Matrix(m) => {
                if m.order() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "noise matrix order {} vs dataset size {n}",
                        m.order()
                    )));
                }
                let dec = sym_eigen(m)?;
                let tol = 1e-10 * m.max_abs().max(1.0);
                if dec.min_eigenvalue() < -tol {
                    return Err(Error::NotPsd(format!(
                        "intrinsic noise matrix has eigenvalue {:.3e}",
                        dec.min_eigenvalue()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}

/// A GP prior: constant mean `μ`, covariance kernel, and intrinsic noise `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPModel {
    pub mean: f64,
    pub kernel: KernelSpec,
    pub intrinsic_noise: IntrinsicNoise,
}

impl GPModel {
    pub fn new(mean: f64, kernel: KernelSpec, intrinsic_noise: IntrinsicNoise) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidInput("mean must be finite".into()));
        }
        kernel.validate()?;
        Ok(GPModel {
            mean,
            kernel,
            intrinsic_noise,
        })
    }

    pub fn noise_matrix(&self, n: usize) -> Result<SymMatrix> {
        self.intrinsic_noise.materialize(n)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let model: GPModel = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        model.kernel.validate()?;
        Ok(model)
    }
}

/// Posterior mean vector and covariance matrix at a set of test points.
#[derive(Debug, Clone)]
pub struct PredictiveDistribution {
    pub mean: Vec<f64>,
    pub covariance: SymMatrix,
}

impl PredictiveDistribution {
    pub fn variances(&self) -> Vec<f64> {
        self.covariance.diag()
    }

    pub fn stddevs(&self) -> Vec<f64> {
        self.covariance
            .diag()
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }
}

/// Factor `K_{X,X} + V (+ Σ)`; retries once with jitter `1e-10·mean(diag)`
/// when the plain factorization fails.
fn factor_system(c: &SymMatrix) -> Result<CholeskyFactor> {
    match cholesky(c, 0.0) {
        Ok(f) => Ok(f),
        Err(Error::NotPositiveDefinite(_)) => {
            let jitter = 1e-10 * c.trace() / c.order() as f64;
            log::warn!("system matrix not PD at zero jitter; retrying with jitter {jitter:.3e}");
            cholesky(c, jitter.max(f64::MIN_POSITIVE))
        }
        Err(e) => Err(e),
    }
}

/// Posterior of the GP at `x_star` given data and optional extra noise `Σ`.
///
/// Mean `μ·1 + K_{*,X}(K_{X,X}+V+Σ)^{-1}(Y − μ·1)` and covariance
/// `K_{*,*} − K_{*,X}(K_{X,X}+V+Σ)^{-1}K_{X,*}`. When `Σ` is supplied the
/// dataset's values are interpreted as the obfuscated responses `W`.
pub fn posterior(
    model: &GPModel,
    data: &Dataset,
    extra_noise: Option<&SymMatrix>,
    x_star: &[Vec<f64>],
) -> Result<PredictiveDistribution> {
    let n = data.len();
    if data.dim() != model.kernel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "data dimension {} vs kernel dimension {}",
            data.dim(),
            model.kernel.dim()
        )));
    }
    if let Some(sigma) = extra_noise {
        if sigma.order() != n {
            return Err(Error::DimensionMismatch(format!(
                "extra noise order {} vs dataset size {n}",
                sigma.order()
            )));
        }
    }
    let kxx = model.kernel.gram_sym(data.points())?;
    let v = model.noise_matrix(n)?;
    let mut system = kxx.add(&v);
    if let Some(sigma) = extra_noise {
        system = system.add(sigma);
    }
    let factor = factor_system(&system)?;

    let centered: Vec<f64> = data.values().iter().map(|y| y - model.mean).collect();
    let alpha = factor.solve_vec(&centered);

    let k_star_x = model.kernel.gram(x_star, data.points())?;
    let mean: Vec<f64> = (0..x_star.len())
        .map(|i| model.mean + crate::linalg::dot(k_star_x.row(i), &alpha))
        .collect();

    let k_star_star = model.kernel.gram_sym(x_star)?;
    let solved = factor.solve_matrix(&k_star_x.transpose()); // (K+V+Σ)^{-1} K_{X,*}
    let reduction = k_star_x.matmul(&solved);
    let covariance = SymMatrix::symmetrize(&k_star_star.to_matrix().sub(&reduction))?;

    Ok(PredictiveDistribution { mean, covariance })
}

/// Log marginal likelihood of the data under the model:
/// `−½(Y−μ1)ᵀ(K+V)^{-1}(Y−μ1) − ½ log det(K+V) − (n/2)·log 2π`.
pub fn log_marginal_likelihood(model: &GPModel, data: &Dataset) -> Result<f64> {
    let n = data.len();
    let kxx = model.kernel.gram_sym(data.points())?;
    let v = model.noise_matrix(n)?;
    let system = kxx.add(&v);
    let factor = factor_system(&system)?;
    let centered: Vec<f64> = data.values().iter().map(|y| y - model.mean).collect();
    let alpha = factor.solve_vec(&centered);
    let quad: f64 = centered.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    Ok(-0.5 * quad - 0.5 * factor.log_det() - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
}

/// Outcome of the closed-form constant-mean/variance fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitSummary {
    pub mean: f64,
    pub variance: f64,
    /// Set when all responses are equal, making the variance estimate zero.
    pub degenerate: bool,
    pub log_likelihood: f64,
}

/// Profile maximum likelihood of a constant mean and signal variance with a
/// fixed unit-amplitude correlation:
/// `μ̂ = (1ᵀR^{-1}Y)/(1ᵀR^{-1}1)`, `σ̂² = (Y−μ̂1)ᵀR^{-1}(Y−μ̂1)/n`.
///
/// `noise_shape`, when given, is an intrinsic-noise shape expressed relative
/// to the signal variance: the total response covariance is modeled as
/// `σ²(R + V₀)`, which keeps the profile closed forms exact; the returned
/// model then carries `V = σ̂²·V₀`. Degenerate data (all responses equal)
/// yields a zero-variance model flagged in the summary, not an error.
pub fn fit_constant_mean_and_variance(
    points: &[Vec<f64>],
    values: &[f64],
    correlation: &KernelSpec,
    noise_shape: Option<&SymMatrix>,
) -> Result<(GPModel, FitSummary)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidInput("fit needs at least two points".into()));
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch(
            "points/values length mismatch".into(),
        ));
    }
    if (correlation.amplitude() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "correlation must have unit amplitude, got {}",
            correlation.amplitude()
        )));
    }
    let mut r = correlation.gram_sym(points)?;
    if let Some(shape) = noise_shape {
        if shape.order() != n {
            return Err(Error::DimensionMismatch(
                "noise shape order mismatch".into(),
            ));
        }
        r = r.add(shape);
    }
    let factor = factor_system(&r)?;
    let ones = vec![1.0; n];
    let ri_y = factor.solve_vec(values);
    let ri_1 = factor.solve_vec(&ones);
    let denom: f64 = ri_1.iter().sum();
    let mu = ri_y.iter().sum::<f64>() / denom;
    let centered: Vec<f64> = values.iter().map(|y| y - mu).collect();
    let ri_c = factor.solve_vec(&centered);
    let sigma2 = centered.iter().zip(&ri_c).map(|(a, b)| a * b).sum::<f64>() / n as f64;

    let y_scale = values.iter().map(|y| y * y).sum::<f64>() / n as f64;
    let degenerate = sigma2 <= 1e-15 * y_scale.max(1.0);
    let sigma2 = if degenerate { 0.0 } else { sigma2 };

    let kernel = correlation.scale_amplitude(sigma2);
    let intrinsic = match noise_shape {
        Some(shape) => IntrinsicNoise::Matrix(shape.scaled(sigma2)),
        None => IntrinsicNoise::none(),
    };
    let model = GPModel::new(mu, kernel, intrinsic)?;
    let log_likelihood = if degenerate {
        f64::NEG_INFINITY
    } else {
        let data = Dataset::new(points.to_vec(), values.to_vec())?;
        log_marginal_likelihood(&model, &data)?
    };
    Ok((
        model,
        FitSummary {
            mean: mu,
            variance: sigma2,
            degenerate,
            log_likelihood,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqexp(c: f64, theta: f64) -> KernelSpec {
        KernelSpec::squared_exponential(c, theta, 1).unwrap()
    }

    fn example1_model() -> (GPModel, Dataset) {
        let model = GPModel::new(0.0, sqexp(1.0, 10.0), IntrinsicNoise::none()).unwrap();
        let points: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
        let values = vec![0.0; 9];
        (model, Dataset::new(points, values).unwrap())
    }

    #[test]
    fn interpolates_noiseless_training_point() {
        let model = GPModel::new(0.7, sqexp(1.0, 10.0), IntrinsicNoise::none()).unwrap();
        let data = Dataset::new(vec![vec![0.0]], vec![0.7]).unwrap();
        let pred = posterior(&model, &data, None, &[vec![0.0]]).unwrap();
        assert!((pred.mean[0] - 0.7).abs() < 1e-12);
        assert!(pred.covariance.get(0, 0).abs() < 1e-10);
    }

    #[test]
    fn unsecured_variance_at_half_is_below_tolerance() {
        // x = 0.5 is a training point, so the noiseless posterior variance
        // there is numerically zero, far below the 0.5 floor
        let (model, data) = example1_model();
        let pred = posterior(&model, &data, None, &[vec![0.5]]).unwrap();
        assert!(pred.covariance.get(0, 0) < 0.5);
        assert!(pred.covariance.get(0, 0).abs() < 1e-8);
    }

    #[test]
    fn variance_never_exceeds_prior() {
        let (model, data) = example1_model();
        let grid: Vec<Vec<f64>> = (0..=100).map(|i| vec![i as f64 / 100.0]).collect();
        let pred = posterior(&model, &data, None, &grid).unwrap();
        for v in pred.variances() {
            assert!(v <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn extra_noise_raises_variance_monotonically() {
        let (model, data) = example1_model();
        // Σ' = Σ + rank-1 PSD bump
        let sigma = SymMatrix::scaled_identity(9, 0.3);
        let bump: Vec<f64> = (0..9).map(|i| 0.2 * (i as f64 + 1.0) / 9.0).collect();
        let mut sigma_bigger = sigma.clone();
        for i in 0..9 {
            for j in i..9 {
                sigma_bigger.set(i, j, sigma_bigger.get(i, j) + bump[i] * bump[j]);
            }
        }
        let grid: Vec<Vec<f64>> = (0..=50).map(|i| vec![i as f64 / 50.0]).collect();
        let small = posterior(&model, &data, Some(&sigma), &grid).unwrap();
        let big = posterior(&model, &data, Some(&sigma_bigger), &grid).unwrap();
        for (a, b) in small.variances().iter().zip(big.variances()) {
            assert!(
                b >= a - 1e-10,
                "variance dropped when noise grew: {a} -> {b}"
            );
        }
    }

    #[test]
    fn log_marginal_likelihood_single_point() {
        let model = GPModel::new(0.3, sqexp(1.0, 10.0), IntrinsicNoise::none()).unwrap();
        let data = Dataset::new(vec![vec![0.0]], vec![0.3]).unwrap();
        let got = log_marginal_likelihood(&model, &data).unwrap();
        let expect = -0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn log_marginal_likelihood_factorizes_when_independent() {
        // two points far enough apart that their correlation underflows to 0
        let model = GPModel::new(0.0, sqexp(1.0, 10.0), IntrinsicNoise::none()).unwrap();
        let data = Dataset::new(vec![vec![0.0], vec![100.0]], vec![0.4, -1.1]).unwrap();
        let got = log_marginal_likelihood(&model, &data).unwrap();
        let uni = |y: f64| -0.5 * y * y - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((got - (uni(0.4) + uni(-1.1))).abs() < 1e-12);
    }

    #[test]
    fn log_marginal_likelihood_matches_direct_density() {
        // brute-force multivariate normal density via Gauss-Jordan inverse
        let model = GPModel::new(0.2, sqexp(1.3, 4.0), IntrinsicNoise::Scalar(0.05)).unwrap();
        let points: Vec<Vec<f64>> = vec![vec![0.1], vec![0.35], vec![0.5], vec![0.77], vec![0.9]];
        let values = vec![0.5, -0.2, 0.1, 0.4, -0.6];
        let data = Dataset::new(points.clone(), values.clone()).unwrap();

        // independent route: explicit inverse and determinant by elimination
        let n = 5;
        let mut c = vec![vec![0.0; 2 * n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = model.kernel.eval(&points[i], &points[j]).unwrap()
                    + if i == j { 0.05 } else { 0.0 };
            }
            c[i][n + i] = 1.0;
        }
        let mut det = 1.0;
        for col in 0..n {
            let piv = c[col][col];
            det *= piv;
            for cell in c[col].iter_mut() {
                *cell /= piv;
            }
            let pivot_row = c[col].clone();
            for (row, cells) in c.iter_mut().enumerate() {
                if row != col {
                    let factor = cells[col];
                    for (cell, p) in cells.iter_mut().zip(&pivot_row) {
                        *cell -= factor * p;
                    }
                }
            }
        }
        let centered: Vec<f64> = values.iter().map(|y| y - 0.2).collect();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += centered[i] * c[i][n + j] * centered[j];
            }
        }
        let expect =
            -0.5 * quad - 0.5 * det.ln() - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

        let got = log_marginal_likelihood(&model, &data).unwrap();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn fit_constant_values_flags_degenerate() {
        let points: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.2]).collect();
        let values = vec![2.5; 5];
        let (model, summary) =
            fit_constant_mean_and_variance(&points, &values, &sqexp(1.0, 10.0), None).unwrap();
        assert!((summary.mean - 2.5).abs() < 1e-10);
        assert!(summary.degenerate);
        assert_eq!(summary.variance, 0.0);
        assert_eq!(model.kernel.amplitude(), 0.0);
    }

    #[test]
    fn fit_reduces_to_iid_for_identity_correlation() {
        // points so far apart the correlation matrix is exactly the identity
        let points: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64 * 100.0]).collect();
        let values = vec![1.0, 3.0, 2.0, 4.0];
        let (_, summary) =
            fit_constant_mean_and_variance(&points, &values, &sqexp(1.0, 10.0), None).unwrap();
        let mean = 2.5;
        let biased_var = values.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / 4.0;
        assert!((summary.mean - mean).abs() < 1e-12);
        assert!((summary.variance - biased_var).abs() < 1e-12);
    }

    #[test]
    fn fit_is_a_stationary_point_of_the_likelihood() {
        // finite-difference stationarity in (μ, σ²) at the estimate
        let points: Vec<Vec<f64>> = (0..=20).map(|i| vec![i as f64 * 0.15]).collect();
        let values: Vec<f64> = points
            .iter()
            .map(|p| 1.1 + 0.1 * (2.0 * p[0]).sin())
            .collect();
        let corr = sqexp(1.0, 200.0);
        let (model, summary) =
            fit_constant_mean_and_variance(&points, &values, &corr, None).unwrap();
        let data = Dataset::new(points.clone(), values.clone()).unwrap();
        let ll = |mu: f64, s2: f64| {
            let m = GPModel::new(mu, corr.scale_amplitude(s2), IntrinsicNoise::none()).unwrap();
            log_marginal_likelihood(&m, &data).unwrap()
        };
        let h_mu = 1e-6 * summary.mean.abs().max(1.0);
        let d_mu = (ll(summary.mean + h_mu, summary.variance)
            - ll(summary.mean - h_mu, summary.variance))
            / (2.0 * h_mu);
        let h_s2 = 1e-6 * summary.variance;
        let d_s2 = (ll(summary.mean, summary.variance + h_s2)
            - ll(summary.mean, summary.variance - h_s2))
            / (2.0 * h_s2);
        assert!(d_mu.abs() <= 1e-5, "d/dmu = {d_mu}");
        assert!(d_s2.abs() <= 1e-5, "d/dsigma2 = {d_s2}");
        assert!(!summary.degenerate);
        let _ = model;
    }

    #[test]
    fn satellite_fit_is_a_local_likelihood_maximum() {
        // perturbing the estimates in either coordinate lowers the likelihood
        let data =
            crate::satellite::generate(&crate::satellite::OrbitParams::default(), 61, (0.0, 3.0))
                .unwrap();
        let corr = sqexp(1.0, 200.0);
        let (_, summary) =
            fit_constant_mean_and_variance(data.points(), data.values(), &corr, None).unwrap();
        let ll = |mu: f64, s2: f64| {
            let m = GPModel::new(mu, corr.scale_amplitude(s2), IntrinsicNoise::none()).unwrap();
            log_marginal_likelihood(&m, &data).unwrap()
        };
        let best = ll(summary.mean, summary.variance);
        for delta in [1e-3, 1e-2] {
            assert!(ll(summary.mean + delta, summary.variance) <= best);
            assert!(ll(summary.mean - delta, summary.variance) <= best);
            assert!(ll(summary.mean, summary.variance * (1.0 + delta)) <= best);
            assert!(ll(summary.mean, summary.variance * (1.0 - delta)) <= best);
        }
    }

    #[test]
    fn posterior_covariance_is_psd_within_roundoff() {
        let (model, data) = example1_model();
        let grid: Vec<Vec<f64>> = (0..=40).map(|i| vec![i as f64 / 40.0]).collect();
        let pred = posterior(&model, &data, None, &grid).unwrap();
        let min_eig = crate::linalg::sym_eigen(&pred.covariance)
            .unwrap()
            .min_eigenvalue();
        assert!(
            min_eig >= -1e-8,
            "posterior covariance eigenvalue {min_eig}"
        );
    }

    #[test]
    fn model_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = GPModel::new(
            1.25,
            sqexp(0.75, 200.0),
            IntrinsicNoise::Diagonal(vec![0.1, 0.2, 0.3]),
        )
        .unwrap();
        model.save_json(&path).unwrap();
        let back = GPModel::load_json(&path).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let data = Dataset::new(
            vec![vec![0.1, 2.0], vec![0.2, -1.0], vec![0.3, 0.5]],
            vec![1.5, -0.25, 0.125],
        )
        .unwrap();
        data.write_csv(&path).unwrap();
        let back = Dataset::read_csv(&path).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn intrinsic_noise_forms() {
        assert!(IntrinsicNoise::Scalar(0.5).materialize(3).is_ok());
        assert!(IntrinsicNoise::Scalar(-0.5).materialize(3).is_err());
        assert!(IntrinsicNoise::Diagonal(vec![0.1, 0.2])
            .materialize(2)
            .is_ok());
        assert!(IntrinsicNoise::Diagonal(vec![0.1]).materialize(2).is_err());
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            IntrinsicNoise::Matrix(bad).materialize(2),
            Err(Error::NotPsd(_))
        ));
    }
}
