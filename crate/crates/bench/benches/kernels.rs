use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use strongsum::norms::{self, NormSpace};
use strongsum::seqclass::{self, SummabilityMatrix};
use strongsum::summation::{self, GammaSequence, QuadratureSpec};
use strongsum::PeriodicFunction;
use strongsum_bench::fixture;

fn stepanov(c: &mut Criterion) {
    let f = fixture("sine-quarter-4").function;
    let s2 = NormSpace::stepanov(2.0).unwrap();
    c.bench_function("stepanov_norm_p2", |b| b.iter(|| norms::stepanov_norm(black_box(&f), 2.0, &s2).unwrap()));
    let unif = NormSpace::uniform();
    c.bench_function("modulus_uniform", |b| b.iter(|| norms::modulus(black_box(&f), 0.5, &unif).unwrap()));
}

fn remez(c: &mut Criterion) {
    let f = PeriodicFunction::new(0.0, (1..=16).map(|j| (1.0 / (j * j) as f64, 0.0)).collect()).unwrap();
    c.bench_function("remez_degree_8", |b| b.iter(|| norms::best_approx_periodic(black_box(&f), 8).unwrap()));
}

fn strong_mean(c: &mut Criterion) {
    let f = fixture("lacunary-cosine").function;
    let row = SummabilityMatrix::cesaro().row(128).unwrap();
    let g = GammaSequence::half_alpha(1.0).unwrap();
    let s = NormSpace::stepanov(f64::INFINITY).unwrap();
    c.bench_function("strong_mean_norm_cesaro_128", |b| {
        b.iter(|| summation::strong_mean_norm(black_box(&f), &row, &g, 2.0, &s).unwrap())
    });
    c.bench_function("classify_cesaro_128", |b| {
        b.iter(|| seqclass::classify(black_box(&SummabilityMatrix::cesaro()), 0, 128, 2.0).unwrap())
    });
}

fn kernel(c: &mut Criterion) {
    let quad = QuadratureSpec::from_tail_bound(1.0, 1e-4).unwrap();
    c.bench_function("kernel_moment_rel_1e-4", |b| {
        b.iter(|| summation::kernel_moment(black_box(1.0), 2.0, 3.0, &quad).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = stepanov, remez, strong_mean, kernel
}
criterion_main!(benches);
