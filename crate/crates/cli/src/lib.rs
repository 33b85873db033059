//! Command-line front end: fit models, compute noise covariances, obfuscate
//! data, predict from released models, and reproduce the worked examples and
//! the satellite study as CSV/JSON plot data.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use privgp_core::Result;

mod basic;
mod examples;
mod output;
mod satellite_cmd;

/// Output format for tabular results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Privacy-aware Gaussian process regression toolkit.
#[derive(Debug, Parser)]
#[command(name = "privgp", version, about)]
pub struct Cli {
    /// Directory where output files are written.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Seed for the synthetic-noise draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Trace-units tolerance for the SDP solver.
    #[arg(long, global = true, default_value_t = privgp_core::sdp::DEFAULT_TOL)]
    pub tol: f64,

    /// Preferred format for tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a constant mean and signal variance by maximum likelihood.
    Fit {
        /// Dataset CSV with columns x_1..x_d,y.
        #[arg(long)]
        data: PathBuf,
        /// Unit-amplitude correlation kernel JSON.
        #[arg(long)]
        correlation: PathBuf,
        /// Optional intrinsic-noise shape (symmetric matrix JSON), relative
        /// to the signal variance.
        #[arg(long)]
        noise_shape: Option<PathBuf>,
    },
    /// Compute the minimum-trace noise covariance for a privacy spec.
    SolveNoise {
        /// GP model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Dataset CSV (only the inputs are used).
        #[arg(long)]
        data: PathBuf,
        /// Privacy specification JSON.
        #[arg(long)]
        privacy: PathBuf,
        /// Restrict the noise covariance to a diagonal matrix.
        #[arg(long)]
        diagonal: bool,
    },
    /// Draw the synthetic noise and write the obfuscated dataset.
    Obfuscate {
        #[arg(long)]
        data: PathBuf,
        /// Noise covariance JSON (as written by solve-noise).
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Evaluate a released model at query points.
    Predict {
        /// Released-model artifact JSON.
        #[arg(long)]
        released: PathBuf,
        /// Query points CSV with columns x_1..x_d.
        #[arg(long)]
        points: PathBuf,
    },
    /// Run the full train → obfuscate → release pipeline from a config.
    Pipeline {
        /// Pipeline config JSON.
        #[arg(long)]
        config: PathBuf,
    },
    /// Single sensitive input at x=0.5 on the nine-point grid: optimal,
    /// diagonal, and unsecured comparisons.
    Example1 {
        /// Privacy tolerance at the sensitive input.
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
    },
    /// Weak vs strong solutions for two sensitive inputs at 0.4 and 0.6.
    Example2 {
        /// Number of points in the grid over the admissible c interval.
        #[arg(long, default_value_t = 20)]
        c_points: usize,
    },
    /// Validity region of the squared-exponential kernel pair.
    Example3 {
        /// Base inverse squared lengthscale θ₀.
        #[arg(long, default_value_t = 10.0)]
        theta0: f64,
    },
    /// Satellite-trajectory study: fit, obfuscate over private segments,
    /// and emit band data for H = 0.1K and H = 0.5K.
    Satellite {
        /// Orbit parameters JSON (defaults to the built-in orbit).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sensitive grid points per private segment.
        #[arg(long, default_value_t = 17)]
        points_per_segment: usize,
        /// Scale factors α for the privacy kernels H = α·K.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.5])]
        alphas: Vec<f64>,
    },
}

/// Dispatch a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Fit {
            data,
            correlation,
            noise_shape,
        } => basic::fit(cli, data, correlation, noise_shape.as_deref()),
        Command::SolveNoise {
            model,
            data,
            privacy,
            diagonal,
        } => basic::solve_noise(cli, model, data, privacy, *diagonal),
        Command::Obfuscate { data, sigma } => basic::obfuscate(cli, data, sigma),
        Command::Predict { released, points } => basic::predict(cli, released, points),
        Command::Pipeline { config } => basic::pipeline(cli, config),
        Command::Example1 { xi } => examples::example1(cli, *xi),
        Command::Example2 { c_points } => examples::example2(cli, *c_points),
        Command::Example3 { theta0 } => examples::example3(cli, *theta0),
        Command::Satellite {
            config,
            points_per_segment,
            alphas,
        } => satellite_cmd::satellite(cli, config.as_deref(), *points_per_segment, alphas),
    }
}

/// Machine-readable error document printed to stderr on failure.
pub fn error_json(err: &privgp_core::Error) -> String {
    serde_json::json!({
        "error": err.to_string(),
        "kind": err.kind(),
    })
    .to_string()
}
