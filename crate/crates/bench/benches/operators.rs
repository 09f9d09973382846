use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use suq2_core::coordalg::gs_basis;
use suq2_core::decomp::{difference_blocks, index_pairing};
use suq2_core::dlssvrep::DlssvRepresentation;
use suq2_core::gnsrep::HatRepresentation;
use suq2_core::{Generator, Triple, Truncation};

const Q: f64 = 0.5;

fn assembly(c: &mut Criterion) {
    let t = Truncation::from_twice(12).unwrap();
    c.bench_function("pi_prime nmax=6", |b| b.iter(|| DlssvRepresentation::new(black_box(t), Q).unwrap()));
    c.bench_function("hat generators nmax=6", |b| b.iter(|| HatRepresentation::new(black_box(t), Q).unwrap()));
    c.bench_function("difference blocks beta nmax=6", |b| {
        b.iter(|| difference_blocks(Generator::Beta, black_box(t), Q).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let t = Truncation::from_twice(3).unwrap();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("gram-schmidt nmax=3/2", |b| b.iter(|| gs_basis(black_box(t)).unwrap()));
    g.finish();
}

fn index(c: &mut Criterion) {
    let t = Truncation::from_twice(8).unwrap();
    let mut g = c.benchmark_group("index");
    g.sample_size(10);
    for triple in [Triple::Cp, Triple::Dlssv] {
        g.bench_function(format!("{triple} nmax=4"), |b| {
            b.iter(|| index_pairing(triple, black_box(t), Q, 1e-4).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, assembly, oracle, index);
criterion_main!(benches);
