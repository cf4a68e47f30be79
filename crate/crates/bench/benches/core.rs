use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use fracbal::balance::is_balanced;
use fracbal::certify::Fixture;
use fracbal::compose::{compose_8341, g_hat_trace};
use fracbal::fracsolve::{chi_fb_lp, solve_cover};
use fracbal::gadgets::{w_hat, w_prime};
use fracbal::{enumerate_sets, verify, EnumOptions, Property};

fn balance(c: &mut Criterion) {
    let g = w_prime().graph;
    let all = g.all_vertices();
    c.bench_function("is_balanced/w_prime_all", |b| {
        b.iter(|| is_balanced(black_box(&g), black_box(&all)).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let g = w_prime().graph;
    let mut group = c.benchmark_group("enumerate/w_prime_maximal");
    for parallel in [false, true] {
        let opts = EnumOptions {
            parallel,
            ..EnumOptions::maximal()
        };
        let name = if parallel { "parallel" } else { "serial" };
        group.bench_function(name, |b| {
            b.iter(|| enumerate_sets(black_box(&g), Property::Balanced, &opts).unwrap())
        });
    }
    group.finish();
}

fn lp(c: &mut Criterion) {
    let g = w_hat().graph;
    c.bench_function("chi_fb/w_hat", |b| b.iter(|| chi_fb_lp(black_box(&g)).unwrap()));

    let wp = w_prime().graph;
    let fam = enumerate_sets(&wp, Property::Balanced, &EnumOptions::maximal()).unwrap();
    c.bench_function("solve_cover/w_prime_family", |b| {
        b.iter_batched(
            || fam.sets.clone(),
            |sets| solve_cover(wp.vertex_count(), &sets).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn certify(c: &mut Criterion) {
    let host = Fixture::Table1.host();
    let cert = Fixture::Table1.load().unwrap();
    c.bench_function("verify/table1", |b| b.iter(|| verify(black_box(&host), black_box(&cert))));

    let trace = g_hat_trace();
    c.bench_function("compose_8341/g_hat", |b| b.iter(|| compose_8341(black_box(&trace)).unwrap()));
}

criterion_group!(benches, balance, enumeration, lp, certify);
criterion_main!(benches);
