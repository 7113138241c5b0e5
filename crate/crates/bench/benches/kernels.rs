use canprod::invertibility::CanonicalEvaluator;
use canprod::{
    m_re, partition_near_real, sd_witness, ComplexPoint, ProductVariant, Weight,
};
use canprod_bench::{compiled_lattice, lattice};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_partial(c: &mut Criterion) {
    let mut group = c.benchmark_group("log_abs_partial");
    for n in [1000usize, 5000, 20000] {
        let compiled = compiled_lattice(n);
        let z = ComplexPoint::new(7.3, 0.4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| compiled.log_abs_partial(black_box(z), n as f64))
        });
    }
    group.finish();
}

fn bench_canonical(c: &mut Criterion) {
    let mut group = c.benchmark_group("log_abs_canonical");
    for n in [1000usize, 5000, 20000] {
        let compiled = compiled_lattice(n);
        let z = ComplexPoint::new(7.3, 0.4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| compiled.log_abs_canonical(black_box(z), 1e-6).unwrap())
        });
    }
    group.finish();
}

fn bench_compile(c: &mut Criterion) {
    let zs = lattice(5000);
    c.bench_function("compile_5000", |b| {
        b.iter(|| {
            canprod::CompiledProduct::compile(black_box(&zs), &ProductVariant::Plain).unwrap()
        })
    });
}

fn bench_witness_search(c: &mut Criterion) {
    let compiled = compiled_lattice(5000);
    let eval = CanonicalEvaluator::new(&compiled, 1e-6);
    c.bench_function("sd_witness_x100", |b| {
        b.iter(|| sd_witness(&eval, black_box(100.0), 2.0).unwrap())
    });
}

fn bench_counting(c: &mut Criterion) {
    let zs = lattice(20000);
    let w = Weight::Log { c: 1.0 };
    let p = partition_near_real(&zs, &w, 1.0).unwrap();
    c.bench_function("m_re_20000", |b| {
        b.iter(|| m_re(black_box(&p), &zs, 1234.5, 1.0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_partial,
    bench_canonical,
    bench_compile,
    bench_witness_search,
    bench_counting
);
criterion_main!(benches);
