use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use atf_bench::{largest_triple, parabola_polygon, sample_triples};
use atf_core::atf::mutate_diagram;
use atf_core::hull::boundary_hull;
use atf_core::lattice::normal_form;
use atf_core::markov::enumerate;
use atf_core::polytope::build_polytope;
use atf_core::{BigInt, Slot};

fn bench_enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for bound in [1_000i64, 10_000, 1_000_000] {
        let n = BigInt::from(bound);
        g.bench_with_input(BenchmarkId::from_parameter(bound), &n, |b, n| b.iter(|| enumerate(black_box(n))));
    }
    g.finish();
}

fn bench_normal_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_form");
    for n in [3i64, 8, 16] {
        let p = parabola_polygon(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| b.iter(|| normal_form(black_box(p))));
    }
    g.finish();
}

fn bench_triples(c: &mut Criterion) {
    let mut g = c.benchmark_group("per_triple");
    let mut ts = sample_triples();
    ts.push(largest_triple(10_000));
    for t in &ts {
        let id = t.to_string();
        g.bench_with_input(BenchmarkId::new("build_polytope", &id), t, |b, t| b.iter(|| build_polytope(black_box(t))));
        g.bench_with_input(BenchmarkId::new("boundary_hull", &id), t, |b, t| b.iter(|| boundary_hull(black_box(t))));
        g.bench_with_input(BenchmarkId::new("mutate_diagram", &id), t, |b, t| {
            b.iter(|| mutate_diagram(black_box(t), Slot::C))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_enumerate, bench_normal_form, bench_triples);
criterion_main!(benches);
