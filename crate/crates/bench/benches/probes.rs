use criterion::{criterion_group, criterion_main, Criterion};
use s1cover::probes::{branch_scan_planar, local_index_planar, local_index_spatial, PlanarOracle, ProbePlane, Window, DEFAULT_N0};
use s1cover::{MapConfig, MapHandle, PlanarPoint, SpatialPoint};
use std::hint::black_box;

fn probes(c: &mut Criterion) {
    let planar = MapHandle::paper_f_planar(MapConfig::regularized());
    let spatial = MapHandle::paper_f(MapConfig::regularized());

    c.bench_function("local_index_apex", |b| {
        b.iter(|| local_index_planar(&planar, black_box(PlanarPoint::APEX), 1e-3, DEFAULT_N0).unwrap().winding)
    });
    c.bench_function("local_index_regular", |b| {
        b.iter(|| local_index_planar(&planar, black_box(PlanarPoint::new(2.0, 0.5)), 1e-3, DEFAULT_N0).unwrap().winding)
    });
    c.bench_function("local_index_circle", |b| {
        let p = SpatialPoint::new(0.6, 0.8, 0.0);
        b.iter(|| local_index_spatial(&spatial, black_box(p), &ProbePlane::Meridian, 1e-3, DEFAULT_N0).unwrap().winding)
    });

    let mut group = c.benchmark_group("scans");
    group.sample_size(10);
    group.bench_function("branch_scan_planar_100x100", |b| {
        let w = Window::new(vec![0.5, -0.5], vec![1.5, 0.5]).unwrap();
        b.iter(|| branch_scan_planar(&planar, &w, 1e-2, 1e-3, None).unwrap().hits.len())
    });
    group.bench_function("oracle_query", |b| {
        let oracle = PlanarOracle::new(&planar, &Window::new(vec![0.01, -7.5], vec![21.0, 7.5]).unwrap(), 5e-2).unwrap();
        b.iter(|| oracle.preimages_refined(black_box(PlanarPoint::new(0.5, 0.3)), 0.0, 16).count())
    });
    group.finish();
}

criterion_group!(benches, probes);
criterion_main!(benches);
