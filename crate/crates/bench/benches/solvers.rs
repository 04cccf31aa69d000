use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use setupsched::search::{class_jump, dual, epsilon_search, two_approx};
use setupsched::{lower_bound_tmin, Rat, Variant};
use setupsched_bench::scaling;

const SIZES: [usize; 3] = [10_000, 40_000, 160_000];

fn searches(c: &mut Criterion) {
    for v in Variant::ALL {
        let mut g = c.benchmark_group(format!("jump/{}", v.short()));
        g.sample_size(10);
        for n in SIZES {
            let inst = scaling(n, 1);
            g.throughput(Throughput::Elements(n as u64));
            g.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, i| b.iter(|| class_jump(i, v)));
        }
        g.finish();
    }
}

fn eps(c: &mut Criterion) {
    let eps = Rat::new(1, 1000);
    let mut g = c.benchmark_group("eps");
    g.sample_size(10);
    let inst = scaling(40_000, 1);
    for v in Variant::ALL {
        g.bench_function(v.short(), |b| b.iter(|| epsilon_search(&inst, v, &eps).unwrap()));
    }
    g.finish();
}

fn single(c: &mut Criterion) {
    let inst = scaling(40_000, 1);
    let mut g = c.benchmark_group("single");
    g.sample_size(20);
    for v in Variant::ALL {
        let t = lower_bound_tmin(&inst, v).scale(5, 4);
        g.bench_function(format!("dual/{}", v.short()), |b| b.iter(|| dual(&inst, v, &t)));
        g.bench_function(format!("two-approx/{}", v.short()), |b| b.iter(|| two_approx(&inst, v)));
    }
    g.finish();
}

criterion_group!(benches, searches, eps, single);
criterion_main!(benches);
