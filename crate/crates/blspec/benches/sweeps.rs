//! Compares the sweep entry points (rayon-parallel under the default
//! `parallel` feature) against hand-rolled sequential loops over the same
//! work items. Run with `--no-default-features` to measure the sequential
//! fallback through the same API.

use criterion::{criterion_group, criterion_main, Criterion};

use blspec::kernels::concentration_check;
use blspec::spectrum::SpectralMeasure;
use blspec::sweep;

fn bench_kolmogorov(c: &mut Criterion) {
    let ns = sweep::even_range(4, 192);
    let mut g = c.benchmark_group("kolmogorov_sweep");
    g.bench_function("api", |b| {
        b.iter(|| sweep::kolmogorov_sweep(&ns).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| {
            ns.iter()
                .map(|&n| SpectralMeasure::new(n).unwrap().kolmogorov_distance())
                .collect::<Vec<_>>()
        });
    });
    g.finish();
}

fn bench_identities(c: &mut Criterion) {
    let ns = sweep::even_range(4, 64);
    let mut g = c.benchmark_group("identity_sweep");
    g.bench_function("api", |b| {
        b.iter(|| sweep::identity_sweep(&ns).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| {
            ns.iter()
                .map(|&n| sweep::identity_checks(n).unwrap())
                .collect::<Vec<_>>()
        });
    });
    g.finish();
}

fn bench_concentration(c: &mut Criterion) {
    let ns = sweep::even_range(4, 400);
    let mut g = c.benchmark_group("concentration_sweep");
    g.sample_size(20);
    g.bench_function("api", |b| {
        b.iter(|| sweep::concentration_sweep(&ns).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| {
            ns.iter()
                .map(|&n| concentration_check(n).unwrap())
                .collect::<Vec<_>>()
        });
    });
    g.finish();
}

criterion_group!(benches, bench_kolmogorov, bench_identities, bench_concentration);
criterion_main!(benches);
