use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use heatbounds::bounds::{c2_bound_minimized, dirichlet_grad_bound, eigen_grad_bound};
use heatbounds::simulate::{bismut_gradient, run_killed};
use heatbounds::spectral::scaling_scan;
use heatbounds::BandConvention;
use heatbounds_bench::{c2_instances, config, dirichlet_basis, interval, sphere};
use std::hint::black_box;

fn bound_minimization(c: &mut Criterion) {
    let instances = c2_instances();
    let mut g = c.benchmark_group("bounds");
    g.throughput(Throughput::Elements(instances.len() as u64));
    g.bench_function("c2-minimized x100", |b| {
        b.iter(|| {
            for &(k, u, lu) in &instances {
                black_box(c2_bound_minimized(k, u, lu).unwrap());
            }
        })
    });
    g.bench_function("dirichlet-grad", |b| b.iter(|| dirichlet_grad_bound(black_box(-2.0), 0.5, 1.0).unwrap()));
    g.bench_function("eigen", |b| b.iter(|| eigen_grad_bound(black_box(3.0), 1.0).unwrap()));
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let paths = 2_000;
    let steps = 100;
    let mut g = c.benchmark_group("monte-carlo");
    g.sample_size(10);
    g.throughput(Throughput::Elements((paths * steps) as u64));
    let s = sphere();
    g.bench_function("sphere bismut path-steps", |b| {
        b.iter(|| bismut_gradient(&s, &config(paths), &[0.0, 0.0, 1.0], 1.0, |x| x[2]).unwrap())
    });
    let m = interval();
    g.bench_function("interval killed path-steps", |b| {
        b.iter(|| run_killed(&m, &config(paths), &[1.0], |x| x[0].sin()).unwrap())
    });
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral");
    g.sample_size(10);
    for &top in &[16usize, 64] {
        let (basis, signal) = dirichlet_basis(top as f64 + 2.0);
        let lambdas: Vec<f64> = (1..=top).map(|l| l as f64).collect();
        g.bench_with_input(BenchmarkId::new("dirichlet scan", top), &lambdas, |b, l| {
            b.iter(|| scaling_scan(&basis, &signal, l, BandConvention::Frequency, 2_001).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bound_minimization, monte_carlo, spectral);
criterion_main!(benches);
