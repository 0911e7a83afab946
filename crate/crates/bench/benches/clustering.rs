use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use swapcluster::analysis::{compute_d_and_filter, sample_partition, PairedSolutions};
use swapcluster::harness::dsampling_seed;
use swapcluster::{assign_all, exact_lq, local_search_lq, rng, InitPolicy, SearchConfig};
use swapcluster_bench::cube_instance;

fn bench_assign(c: &mut Criterion) {
    let mut group = c.benchmark_group("assign_all");
    for n in [64, 256, 1024] {
        let inst = cube_instance(n, 8, 7);
        let open = dsampling_seed(&inst).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| assign_all(black_box(&inst), black_box(&open)).unwrap())
        });
    }
    group.finish();
}

fn bench_local_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search_lq");
    for (n, rho) in [(32, 1), (32, 2), (128, 1)] {
        let inst = cube_instance(n, 4, 11);
        let config = SearchConfig {
            rho,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::new(format!("n{n}"), rho),
            &rho,
            |b, _| b.iter(|| local_search_lq(black_box(&inst), &config, None).unwrap()),
        );
    }
    group.finish();
}

fn bench_partition(c: &mut Criterion) {
    let inst = cube_instance(10, 3, 3);
    let trace = local_search_lq(
        &inst,
        &SearchConfig {
            rho: 2,
            ..SearchConfig::default()
        },
        None,
    )
    .unwrap();
    let opt = exact_lq(&inst, 10_000_000).unwrap();
    let paired = PairedSolutions::new(&inst, &trace.final_solution.open, &opt.best_sets[0]).unwrap();
    let filter = compute_d_and_filter(&inst, &paired, 0.1).unwrap();
    c.bench_function("sample_partition", |b| {
        let mut r = rng::seeded(5);
        b.iter(|| sample_partition(black_box(&inst), &paired, &filter, &mut r).unwrap())
    });
}

criterion_group!(benches, bench_assign, bench_local_search, bench_partition);
criterion_main!(benches);
