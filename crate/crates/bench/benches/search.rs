use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobsthal_core::hsearch::{coverable, max_cover_length};
use jacobsthal_core::isomorph::make_eligible;
use jacobsthal_core::jacobsthal::g_of;
use jacobsthal_core::{arith, dirichlet, HProvider, Int, KnownHTable, Mode, Policy, SearchConfig};

fn cover_search(c: &mut Criterion) {
    let cfg = SearchConfig::serial();
    let mut group = c.benchmark_group("max_cover_length");
    group.sample_size(10);
    for k in [8, 10, 12, 15] {
        let primes = arith::first_primes(k).unwrap().into_vec();
        group.bench_with_input(BenchmarkId::from_parameter(k), &primes, |b, p| {
            b.iter(|| max_cover_length(black_box(p), &cfg).unwrap())
        });
    }
    group.finish();

    // h(12) = 66, so 66 is the smallest infeasible length
    let primes = arith::first_primes(12).unwrap().into_vec();
    c.bench_function("coverable/infeasible k=12 L=66", |b| {
        b.iter(|| coverable(black_box(66), &primes, &cfg).unwrap())
    });
}

fn period_scan(c: &mut Criterion) {
    c.bench_function("g_of/9699690", |b| {
        b.iter(|| g_of(black_box(9_699_690)).unwrap())
    });
}

fn prime_finder(c: &mut Criterion) {
    let provider = HProvider::new(KnownHTable::shipped(), Policy::TableOnly);
    let mut group = c.benchmark_group("find_prime");
    for d in [12u64, 60, 76] {
        let ap = make_eligible(&Int::from(1), d).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &ap, |b, &ap| {
            b.iter(|| dirichlet::find_prime(black_box(ap), &provider, Mode::Unconditional).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cover_search, period_scan, prime_finder);
criterion_main!(benches);
