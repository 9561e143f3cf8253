use criterion::{black_box, criterion_group, criterion_main, Criterion};

use slpdigit::coeff::{coeff_crt, product_tree_mod_p};
use slpdigit::extract::{extract_digits, make_plan};
use slpdigit::modmath::prime_basis;
use slpdigit::slp::{power_digit_approx, SlpProgram};

fn bench_product_tree(c: &mut Criterion) {
    c.bench_function("product_tree T=128 p=99991", |b| {
        b.iter(|| product_tree_mod_p(black_box(128), black_box(17), black_box(99_991)))
    });
}

fn bench_coeff_crt(c: &mut Criterion) {
    c.bench_function("coeff_crt T=64", |b| {
        b.iter(|| coeff_crt(black_box(64), black_box(20), black_box(7)))
    });
}

fn bench_prime_basis(c: &mut Criterion) {
    c.bench_function("prime_basis T=200", |b| b.iter(|| prime_basis(black_box(200))));
}

fn bench_extract_power(c: &mut Criterion) {
    let prog = SlpProgram::power(2, 10_000);
    let digits = power_digit_approx(2, 10_000, 10);
    let plan = make_plan(10, 5_000, 1, digits).unwrap();
    let mut group = c.benchmark_group("extract");
    group.sample_size(10);
    group.bench_function("2^10000 m=5000 y=1", |b| {
        b.iter(|| extract_digits(black_box(&plan), black_box(&prog), 1))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_product_tree,
    bench_coeff_crt,
    bench_prime_basis,
    bench_extract_power
);
criterion_main!(benches);
