use criterion::{criterion_group, criterion_main, Criterion};
use dirlab_core::stochastic::{survival_profile, McConfig, Process, Region};
use dirlab_bench::interval;
use dirlab_core::GeneratorScale;

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let scale = GeneratorScale::Probabilist;
    let interval = interval(-1.0, 1.0, scale);
    let cfg = McConfig {
        paths: 20_000,
        h_t: 1e-3,
        ..McConfig::default()
    };
    let bm = Process::EuclideanBm { dim: 1, scale };
    g.bench_function("interval_bridge_20k", |b| {
        b.iter(|| survival_profile(bm, [0.0; 3], Region::Domain(&interval), &[1.0], &cfg, 0).unwrap())
    });
    let plain = McConfig {
        bridge_correction: false,
        ..cfg
    };
    g.bench_function("interval_plain_20k", |b| {
        b.iter(|| survival_profile(bm, [0.0; 3], Region::Domain(&interval), &[1.0], &plain, 0).unwrap())
    });
    let ball = Region::GaugeBall { radius: 0.5 };
    let short = McConfig { h_t: 1e-4, ..cfg };
    for p in [Process::HeisenbergBm { scale }, Process::Su2Sde { scale }] {
        g.bench_function(format!("{}_gauge_ball_20k", p.name()), |b| {
            b.iter(|| survival_profile(p, [0.0; 3], ball, &[0.25], &short, 0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo);
criterion_main!(benches);
