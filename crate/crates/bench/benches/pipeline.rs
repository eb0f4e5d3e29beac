use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geocurve_bench::bench_class;
use geocurve_core::preshape::project;
use geocurve_core::rng::{class_stream, StreamKind};
use geocurve_core::{
    backward, fit, forward, interp_batch, FitConfig, GeodesicCurve, ParamSet, PreShapeMatrix,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn bench_interp_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("interp_batch");
    for &(m, d) in &[(10usize, 192usize), (64, 192), (10, 768)] {
        let (_, members) = bench_class(2, d, 3);
        let a = project(&members[0]).unwrap();
        let b = project(&members[1]).unwrap();
        let curve = GeodesicCurve::new(a, b).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let t: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("m{m}_d{d}")),
            &t,
            |bch, t| {
                bch.iter(|| interp_batch(&curve, t).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_forward_backward(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_backward");
    for &(m, d) in &[(5usize, 192usize), (10, 192), (20, 192)] {
        let (_, members) = bench_class(m, d, 5);
        let columns: Vec<_> = members.iter().map(|f| project(f).unwrap()).collect();
        let originals = PreShapeMatrix::from_columns(&columns).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let params = ParamSet {
            v_start: members[0].values().to_vec(),
            v_end: members[m - 1].values().to_vec(),
            t_raw: (0..m).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
        };
        let z: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("m{m}_d{d}")),
            &params,
            |bch, params| {
                bch.iter(|| {
                    let (_, cache) = forward(params, &originals, &z, 0.3, 1e-4).unwrap();
                    backward(&cache, &originals)
                });
            },
        );
    }
    group.finish();
}

fn bench_full_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_200_epochs");
    group.sample_size(10);
    {
        let &(m, d) = &(10usize, 192usize);
        let (label, members) = bench_class(m, d, 7);
        let config = FitConfig {
            epochs: 200,
            ..FitConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("m{m}_d{d}")),
            &members,
            |bch, members| {
                bch.iter(|| {
                    let mut rng = class_stream(9, &label, StreamKind::Fit);
                    fit(&label, members, &config, &mut rng).unwrap()
                });
            },
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_interp_batch,
    bench_forward_backward,
    bench_full_fit
);
criterion_main!(benches);
