use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lefschetz_core::invariants::{density, nu_gb, q_gb, trace_graph};
use lefschetz_core::lattice::smith_normal_form;
use lefschetz_core::parametrix::torus_kernel_compare;
use lefschetz_core::parametrix::FourierConvention;
use lefschetz_core::sampling::Sampler;
use lefschetz_core::torus::{graph_mode_sum, FlatTorus, ToriEndomorphism};
use nalgebra::DVector;

fn densities(c: &mut Criterion) {
    let mut g = c.benchmark_group("gb_density");
    let mut s = Sampler::new(1);
    for n in [2, 4, 6] {
        let a = s.transverse_matrix(n);
        let (q, cfg) = (q_gb(n), trace_graph(&a));
        g.bench_with_input(BenchmarkId::new("brute_force", n), &n, |b, _| b.iter(|| density(black_box(&q), black_box(&cfg))));
        g.bench_with_input(BenchmarkId::new("closed_form", n), &n, |b, _| b.iter(|| nu_gb(black_box(&a))));
    }
    g.finish();
}

fn shell_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("graph_mode_sum");
    let mut s = Sampler::new(2);
    for n in [2, 3] {
        let m = s.integer_matrix(n, 2);
        let f = ToriEndomorphism::from_integer(FlatTorus::standard(n), &m, DVector::from_element(n, 0.3)).expect("transverse sample");
        let shells = f.torus.dual_shells(8.0, true);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| graph_mode_sum(&f, black_box(&shells), 0.05)));
    }
    g.finish();

    let t1 = FlatTorus::standard(2);
    let pairs = vec![(DVector::from_vec(vec![0.1, 0.2]), DVector::from_vec(vec![0.7, 0.4]))];
    c.bench_function("kernel_compare_t2", |b| b.iter(|| torus_kernel_compare(&t1, black_box(0.01), &pairs, FourierConvention::Standard)));
}

fn smith(c: &mut Criterion) {
    let mut s = Sampler::new(3);
    let mats: Vec<_> = (0..32).map(|_| s.integer_matrix(4, 3)).collect();
    c.bench_function("smith_normal_form_4x4", |b| {
        b.iter(|| {
            for m in &mats {
                black_box(smith_normal_form(m));
            }
        })
    });
}

criterion_group!(benches, densities, shell_sums, smith);
criterion_main!(benches);
