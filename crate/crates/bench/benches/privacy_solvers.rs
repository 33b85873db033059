use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use privgp_bench::nine_point_model;
use privgp_core::kernels::KernelSpec;
use privgp_core::privacy::{
    diagonal_noise, gram_g_finite, gram_g_uniform_stationary, single_sensitive_noise, weak_noise,
};
use privgp_core::quadrature::QuadratureSettings;
use privgp_core::sampling::NoiseSampler;

fn bench_single_closed_form(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    c.bench_function("single_sensitive_noise/9", |b| {
        b.iter(|| single_sensitive_noise(black_box(&model), &x, &[0.5], 0.5).unwrap())
    });
}

fn bench_weak_sdp(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    let s = vec![vec![0.4], vec![0.6]];
    c.bench_function("weak_noise_sdp/9x2", |b| {
        b.iter(|| weak_noise(black_box(&model), &x, &s, &[0.5, 0.5]).unwrap())
    });
}

fn bench_diagonal_sdp(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    c.bench_function("diagonal_noise_sdp/9", |b| {
        b.iter(|| diagonal_noise(black_box(&model), &x, &[vec![0.5]], &[0.5]).unwrap())
    });
}

fn bench_gram_finite(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    let h = KernelSpec::squared_exponential(0.5, 8.0, 1).unwrap();
    let s: Vec<Vec<f64>> = (0..33).map(|i| vec![0.4 + 0.2 * i as f64 / 32.0]).collect();
    c.bench_function("gram_g_finite/9x33", |b| {
        b.iter(|| gram_g_finite(&model.kernel, &h, black_box(&s), &x).unwrap())
    });
}

fn bench_gram_uniform_quadrature(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    let h = KernelSpec::squared_exponential(0.5, 8.0, 1).unwrap();
    let settings = QuadratureSettings::default();
    c.bench_function("gram_g_uniform_quadrature/9", |b| {
        b.iter(|| gram_g_uniform_stationary(&model.kernel, &h, black_box(&x), &settings).unwrap())
    });
}

fn bench_noise_draws(c: &mut Criterion) {
    let (model, x) = nine_point_model();
    let sigma = single_sensitive_noise(&model, &x, &[0.5], 0.5)
        .unwrap()
        .sigma;
    let sampler = NoiseSampler::new(&sigma).unwrap();
    c.bench_function("noise_draw/9", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            sampler.draw(black_box(seed))
        })
    });
}

criterion_group!(
    benches,
    bench_single_closed_form,
    bench_weak_sdp,
    bench_diagonal_sdp,
    bench_gram_finite,
    bench_gram_uniform_quadrature,
    bench_noise_draws
);
criterion_main!(benches);
