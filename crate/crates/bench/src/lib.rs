//! Shared benchmark fixtures: standard problem instances built from the
//! worked examples and the satellite study.

use privgp_core::kernels::KernelSpec;
use privgp_core::linalg::SymMatrix;
use privgp_core::sampling::SplitMix64;
use privgp_core::satellite::{generate, OrbitParams};
use privgp_core::{Dataset, GPModel, IntrinsicNoise};

/// Nine-point unit-interval model with the squared-exponential kernel.
pub fn nine_point_model() -> (GPModel, Vec<Vec<f64>>) {
    let kernel = KernelSpec::squared_exponential(1.0, 10.0, 1).expect("valid kernel");
    let model = GPModel::new(0.0, kernel, IntrinsicNoise::none()).expect("valid model");
    let points = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
    (model, points)
}

/// The 61-point Kepler radius dataset over three periods.
pub fn satellite_dataset() -> Dataset {
    generate(&OrbitParams::default(), 61, (0.0, 3.0)).expect("valid orbit")
}

/// Deterministic random symmetric matrix with standard-normal entries.
pub fn random_symmetric(order: usize, seed: u64) -> SymMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut m = SymMatrix::zeros(order);
    for i in 0..order {
        for j in i..order {
            let (g, _) = rng.next_normal_pair();
            m.set(i, j, g);
        }
    }
    m
}
