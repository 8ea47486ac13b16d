//! Compares the rayon-parallel default against a single-thread pool on the
//! two kernels that dominate runtime: per-edge curvature LPs and exhaustive
//! density certification. Build with `--no-default-features` for a binary
//! with no thread pool at all; this harness itself needs the `parallel`
//! feature to construct the one-thread baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ricci_core::curvature::{curvature_vector, MethodSelector};
use ricci_core::graph::builders::{gp83_asymmetric, heawood_hexagon_dumbbell};
use ricci_core::graph::WeightVector;
use ricci_core::uniformize::check_condition_brute;

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool")
}

fn bench_curvature_lp(c: &mut Criterion) {
    let graph = gp83_asymmetric();
    let weights = WeightVector::unit(graph.edge_count());
    let mut group = c.benchmark_group("curvature_lp_gp83_asym");
    group.sample_size(20);

    group.bench_function(BenchmarkId::new("threads", "all"), |b| {
        b.iter(|| curvature_vector(&graph, &weights, MethodSelector::LipschitzLp).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function(BenchmarkId::new("threads", "1"), |b| {
        b.iter(|| {
            pool.install(|| {
                curvature_vector(&graph, &weights, MethodSelector::LipschitzLp).unwrap()
            })
        })
    });
    group.finish();
}

fn bench_density_brute(c: &mut Criterion) {
    let graph = heawood_hexagon_dumbbell();
    let mut group = c.benchmark_group("density_brute_heawood_hex");
    group.sample_size(10);

    group.bench_function(BenchmarkId::new("threads", "all"), |b| {
        b.iter(|| check_condition_brute(&graph).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function(BenchmarkId::new("threads", "1"), |b| {
        b.iter(|| pool.install(|| check_condition_brute(&graph).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_curvature_lp, bench_density_brute);
criterion_main!(benches);
