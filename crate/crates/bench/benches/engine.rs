use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixagg::mc_oracle::{quadrature_mixture_pdf, sample_sums};
use mixagg::specfun::bell_table;
use mixagg::{value_at_risk, AggregateModel, MixingDistribution, SimulationPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn catalog() -> Vec<(&'static str, MixingDistribution)> {
    vec![
        ("pareto", MixingDistribution::gamma(3.0, 1.0).unwrap()),
        ("gamma-claims", MixingDistribution::gleser_gamma(0.5, 1.0).unwrap()),
        ("weibull-half", MixingDistribution::levy(1.0).unwrap()),
        ("weibull", MixingDistribution::positive_stable(0.5).unwrap()),
        ("ig", MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap()),
    ]
}

fn density_paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("pdf");
    for (name, m) in catalog() {
        for n in [2usize, 6, 20] {
            let a = AggregateModel::new(m, n).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("{name}/closed"), n), &a, |b, a| {
                b.iter(|| a.pdf_closed(black_box(1.7)).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("{name}/generic"), n), &a, |b, a| {
                b.iter(|| a.pdf_generic(black_box(1.7)).unwrap())
            });
        }
    }
    let ig = MixingDistribution::inverse_gaussian(1.0, 1.0).unwrap();
    g.bench_function("ig/quadrature_oracle/6", |b| {
        b.iter(|| quadrature_mixture_pdf(&ig, 6, black_box(1.7)).unwrap())
    });
    g.finish();
}

fn risk(c: &mut Criterion) {
    let a = AggregateModel::new(MixingDistribution::gamma(3.0, 1.0).unwrap(), 4).unwrap();
    let rep = a.mixture_representation().unwrap();
    c.bench_function("var/quadrature_survival", |b| {
        b.iter(|| value_at_risk(&a, black_box(0.99)).unwrap())
    });
    c.bench_function("var/mixture", |b| {
        b.iter(|| value_at_risk(&rep, black_box(0.99)).unwrap())
    });
}

fn bell(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut g = c.benchmark_group("bell_table");
    for n in [8usize, 32, 64] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| bell_table(n, black_box(&x)))
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    for (name, m) in catalog() {
        let plan = SimulationPlan::frailty(m, 5, 100_000, 42);
        g.bench_with_input(BenchmarkId::from_parameter(name), &plan, |b, p| {
            b.iter(|| sample_sums(p).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, density_paths, risk, bell, simulation);
criterion_main!(benches);
