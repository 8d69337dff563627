use criterion::{criterion_group, criterion_main, Criterion};
use dirlab_core::discrete::{assemble_euclidean, assemble_gasket};
use dirlab_core::spectral::eigensolve;
use dirlab_bench::{interval, unit_disk};
use dirlab_core::GeneratorScale;

fn eigensolve_benches(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigensolve");
    g.sample_size(10);

    let dense = assemble_euclidean(&interval(0.0, 1.0, GeneratorScale::DirichletForm), 1.0 / 256.0, GeneratorScale::DirichletForm).unwrap();
    g.bench_function("interval_dense_255", |b| b.iter(|| eigensolve(&dense, 10).unwrap()));

    let disk = unit_disk(GeneratorScale::DirichletForm);
    let krylov = assemble_euclidean(&disk, 1.0 / 32.0, GeneratorScale::DirichletForm).unwrap();
    g.bench_function("disk_krylov_3200", |b| b.iter(|| eigensolve(&krylov, 6).unwrap()));

    let gasket = assemble_gasket(5).unwrap();
    g.bench_function("gasket_level5", |b| b.iter(|| eigensolve(&gasket, 4).unwrap()));
    g.finish();
}

criterion_group!(benches, eigensolve_benches);
criterion_main!(benches);
