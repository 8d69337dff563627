//! Shared fixtures for the benchmarks.

use dirlab_core::{make_domain, Domain, GaugeKind, GeneratorScale, Shape, SpaceModel};

pub fn interval(a: f64, b: f64, scale: GeneratorScale) -> Domain {
    make_domain(SpaceModel::euclidean(1, scale), Shape::Interval { a, b }).unwrap()
}

pub fn unit_disk(scale: GeneratorScale) -> Domain {
    make_domain(
        SpaceModel::euclidean(2, scale),
        Shape::Ball {
            gauge: GaugeKind::EuclideanNorm,
            radius: 1.0,
            center: vec![0.0, 0.0],
        },
    )
    .unwrap()
}
