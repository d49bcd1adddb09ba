use criterion::{black_box, criterion_group, criterion_main, Criterion};

use lgcy_core::fukaya::{apply_symplectomorphism, enumerate_decorated_polygons, strip_matrix, SeidelConfig};
use lgcy_core::mirror::{diagram_check, pz_lagrangian};
use lgcy_core::ring::build_w;
use lgcy_core::QExp;

fn series(c: &mut Criterion) {
    let phi = build_w(QExp::integer(200)).unwrap().phi;
    c.bench_function("build_w/200", |b| b.iter(|| build_w(black_box(QExp::integer(200))).unwrap()));
    c.bench_function("series_mul/200", |b| b.iter(|| black_box(&phi) * black_box(&phi)));
    c.bench_function("series_inv/200", |b| b.iter(|| black_box(&phi).inv().unwrap()));
}

fn counts(c: &mut Criterion) {
    let config = SeidelConfig::standard();
    let image = apply_symplectomorphism(1, &pz_lagrangian(3).unwrap());
    c.bench_function("strip_matrix/200", |b| {
        b.iter(|| strip_matrix(&config, black_box(&image.lagrangian), QExp::integer(200)).unwrap())
    });
    c.bench_function("decorated_polygons/130", |b| {
        b.iter(|| enumerate_decorated_polygons(&config, 0, black_box(QExp::integer(130))))
    });
}

fn diagram(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagram");
    group.sample_size(10);
    group.bench_function("index0/40", |b| b.iter(|| diagram_check(black_box(0), QExp::integer(40), 6).unwrap()));
    group.finish();
}

criterion_group!(benches, series, counts, diagram);
criterion_main!(benches);
