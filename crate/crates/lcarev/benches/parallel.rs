//! Rayon fan-out versus a sequential loop over the same public building
//! blocks. Built with the default `parallel` feature the library paths
//! run on rayon; `--no-default-features` makes both arms sequential.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lcarev::oracle::{det_gf2, reversible_residues_matrix, transition_matrix};
use lcarev::period::{irreducible_period, poly_period};
use lcarev::rule::Rule;
use lcarev::Poly;
use num_integer::Integer;
use num_traits::One;

fn bench_det_sweep(c: &mut Criterion) {
    let r = Rule::parse("101100011", 4).unwrap();
    let mut group = c.benchmark_group("det_sweep");
    group.sample_size(10);
    for n_max in [128usize, 384] {
        group.bench_with_input(BenchmarkId::new("parallel", n_max), &n_max, |b, &n_max| {
            b.iter(|| reversible_residues_matrix(black_box(&r), n_max));
        });
        group.bench_with_input(BenchmarkId::new("sequential", n_max), &n_max, |b, &n_max| {
            b.iter(|| {
                (1..=n_max)
                    .map(|n| det_gf2(&transition_matrix(black_box(&r), n)).unwrap())
                    .collect::<Vec<_>>()
            });
        });
    }
    group.finish();
}

fn bench_factor_periods(c: &mut Criterion) {
    // product of eight distinct irreducibles: poly_period fans the
    // per-factor order computations out
    let f: Poly = ["11", "111", "1011", "1101", "11111", "100101", "100111001", "1000000011"]
        .iter()
        .map(|s| s.parse::<Poly>().unwrap())
        .fold(Poly::one(), |acc, g| acc.mul(&g));
    let mut group = c.benchmark_group("factor_periods");
    group.bench_function("parallel", |b| {
        b.iter(|| poly_period(black_box(&f)).unwrap().period);
    });
    group.bench_function("sequential", |b| {
        use lcarev::gf2poly::berlekamp_factor;
        b.iter(|| {
            let factorization = berlekamp_factor(black_box(&f)).unwrap();
            let mut lcm = num_bigint::BigUint::one();
            for (g, _) in factorization.factors() {
                lcm = lcm.lcm(&irreducible_period(g).unwrap());
            }
            lcm
        });
    });
    group.finish();
}

criterion_group!(benches, bench_det_sweep, bench_factor_periods);
criterion_main!(benches);
