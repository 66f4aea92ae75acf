//! Parallel vs sequential strategy evaluation.
//!
//! "parallel" runs on the global rayon pool, "sequential" inside a
//! single-thread pool. Building with `--no-default-features` removes rayon
//! entirely; both variants then run the sequential code path.

use std::hint::black_box;

use al_core::estimators::{GaussianNb, GaussianProcess, RbfKernel};
use al_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;

fn blobs(n: usize, seed: u64) -> (FeatureMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let x = Array2::from_shape_fn((n, 4), |(i, j)| {
        let centre = if j == 0 { if y[i] == 0 { -2.0 } else { 2.0 } } else { 0.0 };
        centre + rng.random_range(-1.5..1.5)
    });
    (FeatureMatrix::new(x).unwrap(), y)
}

fn pools() -> [(&'static str, Option<ThreadPool>); 2] {
    [
        ("parallel", None),
        ("sequential", Some(rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap())),
    ]
}

fn run<T: Send>(pool: &Option<ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn classifier(n_train: usize) -> (ActiveLearner, FeatureMatrix) {
    let (x, y) = blobs(n_train + 400, 7);
    let learner = ActiveLearner::fitted(
        Box::new(GaussianNb::new()),
        uncertainty_strategy(UncertaintyMeasure::LeastConfident),
        x.select(&(0..n_train).collect::<Vec<_>>()),
        Targets::Classes(y[..n_train].to_vec()),
    )
    .unwrap();
    (learner, x.select(&(n_train..n_train + 400).collect::<Vec<_>>()))
}

fn bench_eer(c: &mut Criterion) {
    let (learner, pool) = classifier(20);
    let pool = pool.select(&(0..150).collect::<Vec<_>>());
    let mut g = c.benchmark_group("eer_log");
    g.sample_size(10);
    for (name, tp) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&tp, || expected_error_reduction(&learner, black_box(&pool), &EerConfig::with_loss(EerLoss::Log)).unwrap()))
        });
    }
    g.finish();
}

fn bench_density(c: &mut Criterion) {
    let (_, pool) = classifier(10);
    let mut g = c.benchmark_group("information_density");
    for (name, tp) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&tp, || information_density(black_box(&pool), SimilarityKind::EuclideanInverse).unwrap()))
        });
    }
    g.finish();
}

fn bench_ranked_batch(c: &mut Criterion) {
    let (learner, pool) = classifier(50);
    let labeled = learner.training().unwrap().x.clone();
    let mut g = c.benchmark_group("ranked_batch_20");
    for (name, tp) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&tp, || ranked_batch(&learner, black_box(&pool), &labeled, 20, SimilarityKind::EuclideanInverse).unwrap()))
        });
    }
    g.finish();
}

fn bench_committee(c: &mut Criterion) {
    let (x, y) = blobs(600, 3);
    let members = (0..8)
        .map(|_| ActiveLearner::new(Box::new(GaussianNb::new()), RandomSampling { seed: 0 }))
        .collect();
    let mut committee = Committee::new(members, disagreement_strategy(Disagreement::MaxKl)).unwrap();
    committee
        .fit_bootstrap(x.select(&(0..200).collect::<Vec<_>>()), Targets::Classes(y[..200].to_vec()), 0)
        .unwrap();
    let pool = x.select(&(200..600).collect::<Vec<_>>());
    let mut g = c.benchmark_group("committee_max_kl");
    for (name, tp) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&tp, || max_disagreement(&committee, black_box(&pool)).unwrap()))
        });
    }
    g.finish();
}

fn bench_acquisition(c: &mut Criterion) {
    let mut opt = BayesianOptimizer::new(
        Box::new(GaussianProcess::new(RbfKernel::new(0.7, 1.0, 1e-6).unwrap())),
        acquisition_strategy(Acquisition::ExpectedImprovement, AcquisitionParams::default()),
    )
    .unwrap();
    let obs: Vec<[f64; 1]> = (0..40).map(|i| [i as f64 * 0.25]).collect();
    opt.teach(FeatureMatrix::from_rows(&obs).unwrap(), obs.iter().map(|v| v[0].sin()).collect()).unwrap();
    let cands: Vec<[f64; 1]> = (0..5000).map(|i| [i as f64 * 0.002]).collect();
    let cands = FeatureMatrix::from_rows(&cands).unwrap();
    let mut g = c.benchmark_group("acquisition_ei");
    for (name, tp) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run(&tp, || {
                    acquisition_values(&opt, black_box(&cands), Acquisition::ExpectedImprovement, &AcquisitionParams::default())
                        .unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_eer, bench_density, bench_ranked_batch, bench_committee, bench_acquisition);
criterion_main!(benches);
