//! Parallel-vs-sequential benchmarks for the two data-parallel hot paths:
//! contract checking over seeded samples, and the exhaustive family
//! search of the combinatorial lab.

use cichon_core::comblab::{ioe_number, FnSpace, Method, SearchBudget};
use cichon_core::tukey::check::{check_contract, check_contract_seq};
use cichon_core::tukey::Window;
use cichon_core::zoo;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_contracts(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_contract");
    for name in ["null_to_C", "covN_to_nonM", "ideal_to_counting"] {
        let m = zoo::build_morphism(name).unwrap();
        let s = zoo::standard_sampler(name).unwrap();
        let w = Window::new(4, 24, 24).unwrap();
        group.bench_function(format!("{name}/parallel"), |b| {
            b.iter(|| black_box(check_contract(&m, &s, &w, 400, 7)))
        });
        group.bench_function(format!("{name}/sequential"), |b| {
            b.iter(|| black_box(check_contract_seq(&m, &s, &w, 400, 7)))
        });
    }
    group.finish();
}

fn bench_family_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("ioe_exhaustive");
    let space = FnSpace::new(3, 3).unwrap();
    let budget = SearchBudget::default();
    group.bench_function("parallel-backend", |b| {
        b.iter(|| black_box(ioe_number(space, Method::Exhaustive, &budget).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_contracts, bench_family_search);
criterion_main!(benches);
