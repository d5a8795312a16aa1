use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use orlicz_bench::{gaussian, kernel, phis, samples, DEGREES};
use orlicz_core::{
    discrete_norm_ln, discrete_norm_omega, luxemburg_norm_continuous, scan, Check, FamilyKind,
    FamilySpec, ScanOptions,
};

fn continuous(c: &mut Criterion) {
    let mut g = c.benchmark_group("continuous");
    g.sample_size(10);
    for (name, nf) in phis() {
        for n in DEGREES {
            let f = gaussian(n);
            g.bench_with_input(BenchmarkId::new(format!("{name}/gaussian"), n), &f, |b, f| {
                b.iter(|| luxemburg_norm_continuous(&nf, black_box(f)).unwrap())
            });
            let d = kernel(n);
            g.bench_with_input(BenchmarkId::new(format!("{name}/dirichlet"), n), &d, |b, f| {
                b.iter(|| luxemburg_norm_continuous(&nf, black_box(f)).unwrap())
            });
        }
    }
    g.finish();
}

fn discrete(c: &mut Criterion) {
    let mut g = c.benchmark_group("discrete");
    for (name, nf) in phis() {
        for n in DEGREES {
            let s = samples(&gaussian(n), n);
            g.bench_with_input(BenchmarkId::new(format!("{name}/ell"), n), &s, |b, s| {
                b.iter(|| discrete_norm_ln(&nf, black_box(s)).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("{name}/omega"), n), &s, |b, s| {
                b.iter(|| discrete_norm_omega(&nf, black_box(s), n).unwrap())
            });
        }
    }
    g.finish();
}

fn scan_small(c: &mut Criterion) {
    let nfs: Vec<_> = phis().into_iter().map(|(_, nf)| nf).collect();
    let spec = FamilySpec { kind: FamilyKind::Mixed, count: 12, seed: 7 };
    let opts = ScanOptions::default();
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    g.bench_function("mixed12_n16", |b| {
        b.iter(|| scan(&nfs, &[16], &spec, &Check::ALL, &opts))
    });
    g.finish();
}

criterion_group!(benches, continuous, discrete, scan_small);
criterion_main!(benches);
